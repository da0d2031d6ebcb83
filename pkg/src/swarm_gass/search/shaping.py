"""Rank-based fitness shaping."""

from __future__ import annotations

import numpy as np
from scipy.stats import rankdata

from ..errors import InvalidArgument

TIES = ("index", "average")


def _ranks(returns, ties: str = "index") -> np.ndarray:
    r = np.asarray(returns, dtype=np.float64).reshape(-1)
    if r.size < 2:
        raise InvalidArgument(f"need at least 2 returns, got {r.size}")
    if np.isnan(r).any():
        raise InvalidArgument("returns contain NaN")
    if ties not in TIES:
        raise InvalidArgument(f"ties must be one of {TIES}, got {ties!r}")
    if ties == "average":
        # tied returns share the mean of the ranks they span
        return rankdata(r, method="average") - 1.0
    # stable sort: ties keep input order, so lower index gets lower rank
    order = np.argsort(r, kind="stable")
    ranks = np.empty(r.size)
    ranks[order] = np.arange(r.size)
    return ranks


def rank_shape(returns, ties: str = "index") -> np.ndarray:
    """Centered ranks ``r / (N - 1) - 0.5`` in ``[-0.5, 0.5]``.

    ``ties="index"`` ranks equal returns by position; ``ties="average"`` gives
    them the same weight, so e.g. a tied antithetic pair cancels.

    >>> rank_shape([5.0, 1.0, 3.0]).tolist()
    [0.5, -0.5, 0.0]
    """
    ranks = _ranks(returns, ties)
    return ranks / (ranks.size - 1) - 0.5


def positive_rank_shape(returns, ties: str = "index") -> np.ndarray:
    """Strictly positive ranks ``0.1 + r / (N - 1)`` in ``[0.1, 1.1]``."""
    ranks = _ranks(returns, ties)
    return 0.1 + ranks / (ranks.size - 1)
