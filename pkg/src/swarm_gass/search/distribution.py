"""Independent-Gaussian search distribution and population sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgument
from ..seeding import substream

SIGMA_MIN = 1e-6


@dataclass(frozen=True)
class SearchDistribution:
    """Independent Gaussian over each coordinate.

    The natural parameters are ``[mean / var, -1 / (2 var)]`` per coordinate
    and the sufficient statistics are ``[theta, theta**2]``.
    """

    mean: np.ndarray
    stddev: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=np.float64).reshape(-1)
        stddev = np.array(self.stddev, dtype=np.float64).reshape(-1)
        if mean.shape != stddev.shape:
            raise InvalidArgument(
                f"mean and stddev lengths differ: {mean.size} vs {stddev.size}"
            )
        if not np.all(stddev > 0):
            raise InvalidArgument("all stddev entries must be > 0")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "stddev", stddev)

    @property
    def dim(self) -> int:
        return self.mean.size

    @property
    def variance(self) -> np.ndarray:
        return self.stddev**2

    def natural_params(self) -> tuple[np.ndarray, np.ndarray]:
        var = self.variance
        return self.mean / var, -0.5 / var

    @classmethod
    def from_natural(cls, eta1, eta2) -> "SearchDistribution":
        var = -0.5 / np.asarray(eta2, dtype=np.float64)
        return cls(np.asarray(eta1) * var, np.sqrt(var))

    @classmethod
    def isotropic(cls, mean, stddev: float) -> "SearchDistribution":
        mean = np.asarray(mean, dtype=np.float64).reshape(-1)
        return cls(mean, np.full(mean.size, float(stddev)))


@dataclass
class ScoredSample:
    theta: np.ndarray
    raw_return: float
    shaped_weight: float = 0.0


def standard_normal_draws(dim: int, count: int, seed: int, *key: int,
                          antithetic: bool = False) -> np.ndarray:
    """Draw ``count`` standard-normal vectors, vector ``i`` keyed by ``(seed, *key, i)``.

    With ``antithetic`` the odd-indexed vectors are the negation of their
    even-indexed partner.
    """
    eps = np.empty((count, dim))
    for i in range(count):
        if antithetic and i % 2 == 1:
            eps[i] = -eps[i - 1]
        else:
            eps[i] = substream(seed, *key, i).standard_normal(dim)
    return eps


def sample_population(dist: SearchDistribution, count: int, seed: int,
                      antithetic: bool = False) -> np.ndarray:
    """Return ``count`` draws ``mean + stddev * eps_i`` as rows of an array.

    ``eps_i`` comes from the stream keyed by ``(seed, i)``, so the same
    arguments always give the same population.
    """
    if count < 2:
        raise InvalidArgument(f"population count must be >= 2, got {count}")
    eps = standard_normal_draws(dist.dim, count, seed, antithetic=antithetic)
    return dist.mean + dist.stddev * eps
