"""Gradient-based adaptive stochastic search over independent Gaussians.

Each coordinate carries its own 2x2 system in the natural parameters
``(mean / var, -1 / (2 var))``: the sufficient statistics ``[theta, theta**2]``
are estimated to have covariance ``V_hat`` and the step is preconditioned by
``(V_hat + gamma I)^-1``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import InvalidArgument, InvalidState
from .distribution import SIGMA_MIN, ScoredSample, SearchDistribution


def estimate_variance_2x2(thetas) -> np.ndarray:
    """Unbiased covariance of ``T = [theta, theta**2]`` from ``N`` scalar samples.

    ``thetas`` may be shape ``(N,)`` for one coordinate, giving a ``(2, 2)``
    matrix, or ``(N, n)`` for ``n`` coordinates, giving ``(n, 2, 2)``.
    """
    x = np.asarray(thetas, dtype=np.float64)
    if x.ndim == 0 or x.shape[0] < 2:
        raise InvalidArgument("need at least 2 samples")
    N = x.shape[0]
    t = np.stack([x, x * x], axis=-1)  # (N, ..., 2)
    outer = np.einsum("i...a,i...b->...ab", t, t)
    s = t.sum(axis=0)
    return outer / (N - 1) - s[..., :, None] * s[..., None, :] / (N * N - N)


def _unpack(samples: Sequence[ScoredSample], dim: int):
    if len(samples) < 2:
        raise InvalidArgument(f"need at least 2 samples, got {len(samples)}")
    thetas = np.array([s.theta for s in samples], dtype=np.float64)
    if thetas.ndim != 2 or thetas.shape[1] != dim:
        raise InvalidArgument(
            f"sample length does not match distribution dimension {dim}"
        )
    weights = np.array([s.shaped_weight for s in samples], dtype=np.float64)
    return thetas, weights


def gass_update(
    dist: SearchDistribution,
    samples: Sequence[ScoredSample],
    alpha_k: float,
    gamma: float,
    *,
    first_order: bool = False,
    normalizer: str = "sum",
    sigma_min: float = SIGMA_MIN,
) -> SearchDistribution:
    """One GASS step on ``dist`` from weighted samples.

    Args:
        dist: current sampling distribution.
        samples: draws from ``dist`` with their shaped weights, which must be
            positive when ``normalizer="sum"``.
        alpha_k: step size.
        gamma: regulariser added to the variance estimate.
        first_order: drop the variance terms; the mean moves by
            ``alpha / eta / var * sum(w * (theta - mean))`` and the stddev is
            left unchanged. This is the update that coincides with ES.
        normalizer: ``"sum"`` divides by the total weight, ``"count"`` by N.
        sigma_min: floor for the recovered stddev.

    Returns:
        The updated distribution.
    """
    if gamma <= 0:
        raise InvalidArgument(f"gamma must be > 0, got {gamma}")
    thetas, w = _unpack(samples, dist.dim)
    if normalizer == "sum":
        eta = w.sum()
        if not eta > 0:
            raise InvalidState(
                f"normalizer sum(w) = {eta} is not positive; use a positive shaping"
            )
    elif normalizer == "count":
        eta = float(len(w))
    else:
        raise InvalidArgument(f"unknown normalizer {normalizer!r}")

    mu, var = dist.mean, dist.variance
    r1 = w @ (thetas - mu)
    if first_order:
        return SearchDistribution(mu + alpha_k / eta * r1 / var, dist.stddev.copy())

    r2 = w @ (thetas * thetas - (var + mu * mu))
    v = estimate_variance_2x2(thetas)
    a = v[:, 0, 0] + gamma
    b = v[:, 0, 1]
    c = v[:, 1, 1] + gamma
    det = a * c - b * b
    scale = alpha_k / eta
    d1 = scale * (c * r1 - b * r2) / det
    d2 = scale * (a * r2 - b * r1) / det

    eta1 = mu / var + d1
    eta2 = -0.5 / var + d2
    valid = eta2 < 0
    new_var = np.where(valid, -0.5 / np.where(valid, eta2, -1.0), 0.0)
    # invalid precision: fall back to a first-order mean step at the old variance
    new_mu = np.where(valid, eta1 * new_var, mu + d1 * var)
    new_sigma = np.maximum(np.sqrt(new_var), sigma_min)
    return SearchDistribution(new_mu, new_sigma)
