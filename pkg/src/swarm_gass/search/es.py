"""Evolution-strategies update and ADAM step-size adaptation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgument


@dataclass(frozen=True)
class AdamState:
    first_moment: np.ndarray
    second_moment: np.ndarray
    step_count: int = 0

    @classmethod
    def zeros(cls, n: int) -> "AdamState":
        return cls(np.zeros(n), np.zeros(n), 0)

    def __len__(self):
        return self.first_moment.size


def adam_step(grad, base_rate: float, state: AdamState, beta1: float = 0.9,
              beta2: float = 0.999, eps: float = 1e-8):
    """Return ``(step, new_state)`` for an ascent step along ``grad``."""
    g = np.asarray(grad, dtype=np.float64)
    if g.shape != state.first_moment.shape:
        raise InvalidArgument(
            f"gradient length {g.size} does not match ADAM state length {len(state)}"
        )
    t = state.step_count + 1
    m = beta1 * state.first_moment + (1.0 - beta1) * g
    v = beta2 * state.second_moment + (1.0 - beta2) * g * g
    m_hat = m / (1.0 - beta1**t)
    v_hat = v / (1.0 - beta2**t)
    step = base_rate * m_hat / (np.sqrt(v_hat) + eps)
    return step, AdamState(m, v, t)


def es_gradient(epsilons, weights, gamma: float) -> np.ndarray:
    """Smoothed-gradient estimate ``sum(w_i * eps_i) / (N * gamma)``."""
    eps = np.asarray(epsilons, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if eps.ndim != 2 or eps.shape[0] != w.size:
        raise InvalidArgument(
            f"got {eps.shape[0] if eps.ndim else 0} noise vectors and {w.size} weights"
        )
    if w.size < 2:
        raise InvalidArgument("need at least 2 samples")
    if gamma <= 0:
        raise InvalidArgument(f"gamma must be > 0, got {gamma}")
    return (w @ eps) / (w.size * gamma)


def es_update(theta, epsilons, weights, alpha_k: float, gamma: float,
              adam: AdamState | None = None, *, use_adam: bool = True,
              beta1: float = 0.9, beta2: float = 0.999, adam_eps: float = 1e-8):
    """Move ``theta`` along the ES gradient estimate.

    With ``use_adam=False`` the step is exactly ``alpha_k * g`` and ``adam``
    is returned untouched.
    """
    theta = np.asarray(theta, dtype=np.float64)
    g = es_gradient(epsilons, weights, gamma)
    if g.shape != theta.shape:
        raise InvalidArgument(
            f"noise length {g.size} does not match parameter length {theta.size}"
        )
    if not use_adam:
        return theta + alpha_k * g, adam
    if adam is None:
        adam = AdamState.zeros(theta.size)
    step, adam = adam_step(g, alpha_k, adam, beta1, beta2, adam_eps)
    return theta + step, adam
