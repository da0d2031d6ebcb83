"""Sampling, fitness shaping and the GASS / ES / CEM updates."""

from .cem import cem_update, elite_count
from .distribution import (
    SIGMA_MIN,
    ScoredSample,
    SearchDistribution,
    sample_population,
    standard_normal_draws,
)
from .es import AdamState, adam_step, es_gradient, es_update
from .gass import estimate_variance_2x2, gass_update
from .optimizer import (
    Optimizer,
    OptimizerConfig,
    Population,
    UpdateReport,
    schedule,
)
from .shaping import positive_rank_shape, rank_shape

__all__ = [
    "AdamState",
    "Optimizer",
    "OptimizerConfig",
    "Population",
    "SIGMA_MIN",
    "ScoredSample",
    "SearchDistribution",
    "UpdateReport",
    "adam_step",
    "cem_update",
    "elite_count",
    "es_gradient",
    "es_update",
    "estimate_variance_2x2",
    "gass_update",
    "positive_rank_shape",
    "rank_shape",
    "sample_population",
    "schedule",
    "standard_normal_draws",
]
