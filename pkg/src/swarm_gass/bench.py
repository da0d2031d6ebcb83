"""Analytic test functions and a driver that runs the optimizers on them.

All functions are minimised at the stated optimum; the optimizers maximise,
so the driver feeds them ``-f``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .errors import InvalidArgument
from .search import Optimizer, OptimizerConfig


def sphere(x):
    x = np.asarray(x, dtype=np.float64)
    return np.sum(x * x, axis=-1)


def rosenbrock(x):
    x = np.asarray(x, dtype=np.float64)
    return np.sum(100.0 * (x[..., 1:] - x[..., :-1] ** 2) ** 2 + (1.0 - x[..., :-1]) ** 2, axis=-1)


def rastrigin(x):
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[-1]
    return 10.0 * n + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x), axis=-1)


@dataclass(frozen=True)
class BenchFunction:
    name: str
    dim: int
    fn: Callable
    optimum: np.ndarray
    optimum_value: float

    def __call__(self, x):
        return self.fn(x)


_OPTIMA = {"sphere": 0.0, "rosenbrock": 1.0, "rastrigin": 0.0}
_FUNCS = {"sphere": sphere, "rosenbrock": rosenbrock, "rastrigin": rastrigin}


def get_function(name: str, dim: int) -> BenchFunction:
    if name not in _FUNCS:
        raise InvalidArgument(f"unknown bench function {name!r}; choose from {sorted(_FUNCS)}")
    if dim < 1 or (name == "rosenbrock" and dim < 2):
        raise InvalidArgument(f"invalid dimension {dim} for {name}")
    return BenchFunction(name, dim, _FUNCS[name], np.full(dim, _OPTIMA[name]), 0.0)


# settings used by the command-line benchmark unless overridden
BENCH_DEFAULTS = {
    "ES": OptimizerConfig(mode="ES", alpha0=0.05, gamma=0.1, fixed_sample_size=100),
    "GASS": OptimizerConfig(mode="GASS", alpha0=0.1, gamma=0.1, sigma0=1.0, fixed_sample_size=100),
    "CEM": OptimizerConfig(mode="CEM", sigma0=1.0, elite_frac=0.2, fixed_sample_size=100),
}


def default_start(dim: int, radius: float = 5.0) -> np.ndarray:
    """The fixed starting point: all coordinates equal, at distance ``radius`` from 0."""
    return np.full(dim, radius / np.sqrt(dim))


def run_bench(func: BenchFunction, config: OptimizerConfig, iterations: int,
              seed: int = 0, x0=None) -> Iterator[dict]:
    """Yield one record per iteration, starting with the start point at ``k=0``.

    Each record carries the value at the current center and the best sampled
    value seen so far.
    """
    if x0 is None:
        x0 = default_start(func.dim)
    opt = Optimizer(config, x0, seed=seed)
    value = float(func(opt.center))
    best = value
    yield {"k": 0, "value": value, "best": best, "distance": _dist(func, opt.center)}
    for _ in range(iterations):
        pop = opt.ask()
        f = func(pop.thetas)
        opt.tell(pop, -f)
        value = float(func(opt.center))
        best = min(best, float(f.min()), value)
        yield {"k": opt.k, "value": value, "best": best, "distance": _dist(func, opt.center)}


def _dist(func, x):
    return float(np.linalg.norm(x - func.optimum))
