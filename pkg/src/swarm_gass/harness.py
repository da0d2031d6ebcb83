"""Training loop: perturb, roll out, shape, update; single team or self-play.

Episodes are grouped into fixed chunks of ``chunk_size`` and the chunks are
run serially or in a process pool. Results are placed back by episode index,
and each episode's randomness comes only from its own derived seed, so the
output never depends on ``parallelism``.

Seed keys under the master seed ``s`` (see :mod:`swarm_gass.seeding`):

* perturbation ``i`` of team ``t`` at iteration ``k``: ``(s, t, k, PERTURB, i)``
* training episode ``i``, repeat ``r``: ``(s, k, i, r, EPISODE)``
* evaluation episode ``j``: ``(e, j, EVAL)`` where ``e = derive_seed(s, k, EVAL)``,
  matching :func:`evaluate` called with seed ``e``
* initial parameters of team ``t``: ``(s, t, INIT)``
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, InvalidArgument
from .policy.network import init_params
from .scenarios import build
from .search.optimizer import Optimizer, OptimizerConfig, UpdateReport
from .seeding import EPISODE, EVAL, INIT, derive_seed, substream
from .sim.config import WorldConfig
from .sim.engine import run_episodes

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    scenario: str = "base_attack"
    scale: float = 0.1
    iterations: int = 10
    episodes_per_sample: int = 1
    # 0 disables; otherwise evaluate the unperturbed policy every eval_every iterations
    eval_every: int = 0
    eval_episodes: int = 5
    checkpoint_every: int = 0
    seed: int = 0
    parallelism: int = 1
    chunk_size: int = 16
    policy_shape: Optional[tuple] = None
    world: WorldConfig = field(default_factory=WorldConfig)
    init_gain: float = 1.0
    # same environment seed for every perturbation of an iteration
    common_random_numbers: bool = False
    # self-play only: both teams start from team 0's parameters / share noise
    shared_init: bool = False
    shared_noise: bool = False

    def __post_init__(self):
        for name in ("iterations", "episodes_per_sample", "parallelism", "chunk_size"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1", name)
        if self.eval_every < 0 or self.checkpoint_every < 0:
            raise ConfigError("cadences must be >= 0", "eval_every")
        if self.eval_every and self.eval_episodes < 1:
            raise ConfigError("eval_episodes must be >= 1", "eval_episodes")

    def build_scenario(self):
        return build(self.scenario, self.scale, policy_shape=self.policy_shape, world=self.world)


@dataclass(frozen=True)
class ScoreStats:
    mean: float
    median: float
    q25: float
    q75: float
    scores: tuple

    @classmethod
    def of(cls, scores) -> "ScoreStats":
        s = np.asarray(scores, dtype=np.float64)
        q25, med, q75 = np.percentile(s, [25, 50, 75])
        return cls(float(s.mean()), float(med), float(q25), float(q75), tuple(s.tolist()))

    def to_dict(self) -> dict:
        return {"mean": self.mean, "median": self.median, "q25": self.q25, "q75": self.q75}


@dataclass
class IterationRecord:
    """One iteration. Dicts are keyed by learned team index.

    ``eval`` scores the unperturbed parameters this iteration perturbed
    around, i.e. the result of the previous update.
    """

    k: int
    alpha_k: float
    n_k: int
    returns: dict
    weights: dict
    reports: dict
    eval: Optional[dict] = None

    def to_dict(self) -> dict:
        out = {"k": self.k, "alpha_k": self.alpha_k, "N_k": self.n_k,
               "returns": {str(t): ScoreStats.of(r).to_dict() for t, r in self.returns.items()},
               "update_norm": {str(t): r.update_norm for t, r in self.reports.items()},
               "eval": None}
        if self.eval is not None:
            out["eval"] = {str(t): s.to_dict() for t, s in self.eval.items()}
        return out


def _run_chunk(args):
    scenario, params, seeds = args
    return np.array([r.returns for r in run_episodes(scenario, params, seeds)])


class _Runner:
    """Runs ``(params per team, seeds)`` work lists in fixed chunks."""

    def __init__(self, scenario, parallelism: int, chunk_size: int):
        self.scenario = scenario
        self.chunk = chunk_size
        self.pool = ProcessPoolExecutor(parallelism) if parallelism > 1 else None

    def returns(self, params: dict, seeds) -> np.ndarray:
        """``params[t]`` is ``(E, P)``; returns ``(E, teams)``."""
        jobs = []
        for lo in range(0, len(seeds), self.chunk):
            hi = lo + self.chunk
            jobs.append((self.scenario, {t: p[lo:hi] for t, p in params.items()}, seeds[lo:hi]))
        if self.pool is None:
            parts = [_run_chunk(j) for j in jobs]
        else:
            parts = list(self.pool.map(_run_chunk, jobs))
        return np.concatenate(parts, axis=0)

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()
            self.pool = None


def evaluate(params, scenario, n_episodes: int, seed: int, team: Optional[int] = None,
             parallelism: int = 1, chunk_size: int = 16) -> ScoreStats:
    """Score the unperturbed ``params`` over ``n_episodes`` seeds ``(seed, j, EVAL)``.

    ``params`` is a vector for the scenario's single learned team or a dict
    by team. The statistics are for ``team`` (default: first learned team).
    """
    if n_episodes < 1:
        raise InvalidArgument("n_episodes must be >= 1")
    if not isinstance(params, dict):
        params = {scenario.learned_teams[0]: params}
    if team is None:
        team = scenario.learned_teams[0]
    seeds = [derive_seed(seed, j, EVAL) for j in range(n_episodes)]
    runner = _Runner(scenario, parallelism, chunk_size)
    try:
        batch = {t: np.broadcast_to(np.asarray(p, dtype=np.float64), (n_episodes, np.size(p)))
                 for t, p in params.items()}
        scores = runner.returns(batch, seeds)[:, team]
    finally:
        runner.close()
    return ScoreStats.of(scores)


class Trainer:
    """Owns one optimizer per learned team and steps them together.

    With one learned team this is the single-team loop; with two it is
    self-play where episode ``i`` pits team 0's perturbation ``i`` against
    team 1's perturbation ``i`` and each team is shaped on its own returns.
    """

    def __init__(self, config: TrainConfig, optimizers: Optional[dict] = None):
        self.config = config
        self.scenario = config.build_scenario()
        self.teams = self.scenario.learned_teams
        if optimizers is None:
            optimizers = {}
            for t in self.teams:
                init_team = self.teams[0] if config.shared_init else t
                rng = substream(config.seed, init_team, INIT)
                theta0 = init_params(self.scenario.policy_shape, rng, config.init_gain)
                stream = (self.teams[0],) if config.shared_noise else (t,)
                optimizers[t] = Optimizer(config.optimizer, theta0, config.seed, stream=stream)
        self.optimizers = optimizers

    @property
    def k(self) -> int:
        return next(iter(self.optimizers.values())).k

    def params(self) -> dict:
        return {t: o.center.copy() for t, o in self.optimizers.items()}

    def step(self, runner: _Runner) -> IterationRecord:
        cfg = self.config
        pops = {t: o.ask() for t, o in self.optimizers.items()}
        first = pops[self.teams[0]]
        k, n = first.k, len(first)
        reps = cfg.episodes_per_sample
        seeds = [derive_seed(cfg.seed, k, 0 if cfg.common_random_numbers else i, r, EPISODE)
                 for i in range(n) for r in range(reps)]
        batch = {t: np.repeat(p.thetas, reps, axis=0) for t, p in pops.items()}
        do_eval = cfg.eval_every > 0 and (k - 1) % cfg.eval_every == 0
        if do_eval:
            m = cfg.eval_episodes
            eval_seed = derive_seed(cfg.seed, k, EVAL)
            seeds += [derive_seed(eval_seed, j, EVAL) for j in range(m)]
            for t, o in self.optimizers.items():
                batch[t] = np.concatenate([batch[t], np.broadcast_to(o.center, (m, o.dim))])
        out = runner.returns(batch, seeds)
        train = out[: n * reps].reshape(n, reps, -1).mean(axis=1)

        returns, weights, reports = {}, {}, {}
        for t, o in self.optimizers.items():
            returns[t] = train[:, t]
            reports[t], weights[t] = o.tell(pops[t], returns[t])
        ev = None
        if do_eval:
            ev = {t: ScoreStats.of(out[n * reps:, t]) for t in self.teams}
        return IterationRecord(k, first.alpha_k, n, returns, weights, reports, ev)


def _train(config: TrainConfig, n_teams: int, trainer: Optional[Trainer],
           callback: Optional[Callable]):
    trainer = trainer or Trainer(config)
    if len(trainer.teams) != n_teams:
        raise ConfigError(
            f"scenario {config.scenario!r} has {len(trainer.teams)} learned team(s), "
            f"this loop needs {n_teams}", "scenario",
        )
    records = []
    runner = _Runner(trainer.scenario, config.parallelism, config.chunk_size)
    try:
        while trainer.k < config.iterations:
            rec = trainer.step(runner)
            records.append(rec)
            log.info("k=%d returns=%s", rec.k,
                     {t: float(np.median(r)) for t, r in rec.returns.items()})
            if callback is not None:
                callback(trainer, rec)
    finally:
        runner.close()
    return trainer, records


def train_single(config: TrainConfig, trainer: Optional[Trainer] = None,
                 callback: Optional[Callable] = None):
    """Train the scenario's one learned team; returns ``(params, records)``.

    ``trainer`` resumes from existing optimizer state; ``callback(trainer,
    record)`` runs after every iteration (metrics, checkpoints).
    """
    trainer, records = _train(config, 1, trainer, callback)
    return trainer.params()[trainer.teams[0]], records


def train_selfplay(config: TrainConfig, trainer: Optional[Trainer] = None,
                   callback: Optional[Callable] = None):
    """Train both teams of a two-team scenario concurrently; returns ``(params by team, records)``."""
    trainer, records = _train(config, 2, trainer, callback)
    return trainer.params(), records
