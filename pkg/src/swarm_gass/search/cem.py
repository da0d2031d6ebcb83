"""Cross-entropy method baseline: refit the Gaussian to the elite samples."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..errors import InvalidArgument
from .distribution import SIGMA_MIN, ScoredSample, SearchDistribution


def elite_count(n_samples: int, elite_frac: float) -> int:
    if not 0 < elite_frac <= 1:
        raise InvalidArgument(f"elite_frac must be in (0, 1], got {elite_frac}")
    # round first so e.g. 0.2 * 50 does not ceil to 11
    return math.ceil(round(elite_frac * n_samples, 9))


def cem_update(dist: SearchDistribution, samples: Sequence[ScoredSample],
               elite_frac: float = 0.2, sigma_min: float = SIGMA_MIN) -> SearchDistribution:
    """Refit mean and (Bessel-corrected) stddev to the best samples by raw return.

    Ties in return are broken in favour of the lower sample index.
    """
    n_elite = elite_count(len(samples), elite_frac)
    if n_elite < 2:
        raise InvalidArgument(
            f"elite set has {n_elite} member(s); need >= 2"
        )
    returns = np.array([s.raw_return for s in samples], dtype=np.float64)
    thetas = np.array([s.theta for s in samples], dtype=np.float64)
    if thetas.ndim != 2 or thetas.shape[1] != dist.dim:
        raise InvalidArgument("sample length does not match distribution dimension")
    order = np.argsort(-returns, kind="stable")
    elites = thetas[order[:n_elite]]
    mean = elites.mean(axis=0)
    std = np.maximum(elites.std(axis=0, ddof=1), sigma_min)
    return SearchDistribution(mean, std)
