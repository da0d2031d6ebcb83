"""Optimizer configuration, step-size schedules and an ask/tell driver."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import ConfigError, InvalidArgument
from ..seeding import PERTURB
from .cem import cem_update, elite_count
from .distribution import SIGMA_MIN, ScoredSample, SearchDistribution, standard_normal_draws
from .es import AdamState, es_update
from .gass import gass_update
from .shaping import positive_rank_shape, rank_shape

MODES = ("ES", "GASS", "CEM")


@dataclass(frozen=True)
class OptimizerConfig:
    mode: str = "ES"
    alpha0: float = 0.01
    alpha_exp: float = 0.0
    n0: int = 300
    tau: float = 1.0
    gamma: float = 0.02
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    elite_frac: float = 0.2
    fixed_sample_size: Optional[int] = 300
    # initial stddev of the GASS / CEM sampling distribution
    sigma0: float = 0.02
    sigma_min: float = SIGMA_MIN
    use_adam: bool = True
    antithetic: bool = False
    # how the driver ranks exactly tied returns ("average" or "index")
    rank_ties: str = "average"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}", "mode")
        if not self.alpha0 > 0:
            raise ConfigError("alpha0 must be > 0", "alpha0")
        if not 0 <= self.alpha_exp < 1:
            raise ConfigError("alpha_exp must be in [0, 1)", "alpha_exp")
        if not self.gamma > 0:
            raise ConfigError("gamma must be > 0", "gamma")
        if not self.sigma0 > 0:
            raise ConfigError("sigma0 must be > 0", "sigma0")
        if self.rank_ties not in ("index", "average"):
            raise ConfigError("rank_ties must be 'index' or 'average'", "rank_ties")
        if not 0 < self.elite_frac <= 1:
            raise ConfigError("elite_frac must be in (0, 1]", "elite_frac")
        if self.fixed_sample_size is not None:
            if self.fixed_sample_size < 2:
                raise ConfigError("fixed_sample_size must be >= 2", "fixed_sample_size")
        else:
            if self.n0 < 2:
                raise ConfigError("n0 must be >= 2", "n0")
            if not self.tau > 2 * self.alpha_exp:
                raise ConfigError(
                    f"tau ({self.tau}) must exceed 2 * alpha_exp ({2 * self.alpha_exp})",
                    "tau",
                )


def schedule(k: int, config: OptimizerConfig) -> tuple[float, int]:
    """Step size ``alpha0 / k**alpha_exp`` and sample size ``ceil(n0 * k**(tau - alpha_exp))``."""
    if k < 1:
        raise InvalidArgument(f"iteration index must be >= 1, got {k}")
    alpha = config.alpha0 / k**config.alpha_exp
    if config.fixed_sample_size is not None:
        return alpha, int(config.fixed_sample_size)
    if not config.tau > 2 * config.alpha_exp:
        raise ConfigError("tau must exceed 2 * alpha_exp", "tau")
    n = config.n0 * k ** (config.tau - config.alpha_exp)
    # guard against e.g. 8.000000000000002 ceiling to 9
    return alpha, max(2, math.ceil(round(n, 9)))


@dataclass
class UpdateReport:
    k: int
    alpha_k: float
    n_k: int
    mean_return: float
    max_return: float
    update_norm: float


@dataclass
class Population:
    """One iteration's candidates: ``thetas[i] = center + scale * eps[i]``."""

    k: int
    alpha_k: float
    thetas: np.ndarray
    eps: np.ndarray

    def __len__(self):
        return self.thetas.shape[0]


@dataclass
class Optimizer:
    """Stateful ask/tell wrapper around the search updates.

    ``center`` is the ES parameter vector or the distribution mean.
    The noise of iteration ``k``, sample ``i`` is keyed by
    ``(seed, *stream, k, PERTURB, i)``.
    """

    config: OptimizerConfig
    center: np.ndarray
    seed: int = 0
    stddev: Optional[np.ndarray] = None
    adam: Optional[AdamState] = None
    k: int = 0
    stream: tuple = field(default_factory=tuple)

    def __post_init__(self):
        self.center = np.array(self.center, dtype=np.float64).reshape(-1)
        if self.config.mode == "ES":
            if self.adam is None:
                self.adam = AdamState.zeros(self.center.size)
        elif self.stddev is None:
            self.stddev = np.full(self.center.size, self.config.sigma0)
        else:
            self.stddev = np.array(self.stddev, dtype=np.float64).reshape(-1)

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def distribution(self) -> SearchDistribution:
        if self.config.mode == "ES":
            return SearchDistribution.isotropic(self.center, self.config.gamma)
        return SearchDistribution(self.center, self.stddev)

    def ask(self) -> Population:
        k = self.k + 1
        alpha, n = schedule(k, self.config)
        eps = standard_normal_draws(
            self.dim, n, self.seed, *self.stream, k, PERTURB,
            antithetic=self.config.antithetic,
        )
        scale = self.config.gamma if self.config.mode == "ES" else self.stddev
        return Population(k, alpha, self.center + scale * eps, eps)

    def tell(self, pop: Population, returns) -> tuple[UpdateReport, np.ndarray]:
        """Apply the update for ``pop`` and return the report and shaped weights."""
        returns = np.asarray(returns, dtype=np.float64).reshape(-1)
        if pop.k != self.k + 1:
            raise InvalidArgument(f"population is for iteration {pop.k}, expected {self.k + 1}")
        if returns.size != len(pop):
            raise InvalidArgument(f"got {returns.size} returns for {len(pop)} samples")
        cfg = self.config
        old = self.center.copy()
        if cfg.mode == "ES":
            weights = rank_shape(returns, cfg.rank_ties)
            self.center, self.adam = es_update(
                self.center, pop.eps, weights, pop.alpha_k, cfg.gamma, self.adam,
                use_adam=cfg.use_adam, beta1=cfg.adam_beta1, beta2=cfg.adam_beta2,
                adam_eps=cfg.adam_eps,
            )
        elif cfg.mode == "GASS":
            weights = positive_rank_shape(returns, cfg.rank_ties)
            samples = [ScoredSample(t, r, w) for t, r, w in zip(pop.thetas, returns, weights)]
            dist = gass_update(self.distribution, samples, pop.alpha_k, cfg.gamma,
                               sigma_min=cfg.sigma_min)
            self.center, self.stddev = dist.mean, dist.stddev
        else:
            n_elite = elite_count(len(pop), cfg.elite_frac)
            weights = np.zeros(len(pop))
            weights[np.argsort(-returns, kind="stable")[:n_elite]] = 1.0
            samples = [ScoredSample(t, r, w) for t, r, w in zip(pop.thetas, returns, weights)]
            dist = cem_update(self.distribution, samples, cfg.elite_frac, cfg.sigma_min)
            self.center, self.stddev = dist.mean, dist.stddev
        self.k = pop.k
        report = UpdateReport(
            k=pop.k,
            alpha_k=pop.alpha_k,
            n_k=len(pop),
            mean_return=float(returns.mean()),
            max_return=float(returns.max()),
            update_norm=float(np.linalg.norm(self.center - old)),
        )
        return report, weights
