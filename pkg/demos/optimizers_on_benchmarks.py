"""Compare ES, GASS and CEM on the analytic benchmark functions.

Run from the repository root:

    python3 demos/optimizers_on_benchmarks.py

Sphere is easy for all three.  Rastrigin is where they separate: CEM's
sampling distribution collapses into whichever basin it lands in first, while
ES with a wide fixed smoothing radius averages over the ripples and keeps
sliding toward the global bowl.
"""

import numpy as np

from swarm_gass.bench import BENCH_DEFAULTS, default_start, get_function, run_bench
from swarm_gass.search import OptimizerConfig


def trace(func, config, iterations, seed=0):
    recs = list(run_bench(func, config, iterations, seed=seed, x0=default_start(func.dim)))
    return np.array([r["value"] for r in recs]), np.array([r["distance"] for r in recs])


def sphere_race():
    func = get_function("sphere", 10)
    print("10-D sphere, first iteration within 0.1 of the optimum")
    for mode, cfg in BENCH_DEFAULTS.items():
        _, dist = trace(func, cfg, 800)
        hit = np.flatnonzero(dist < 0.1)
        print(f"  {mode:4s}  k={hit[0] if hit.size else 'never':>5}  final distance {dist[-1]:.2e}")


def rastrigin_race(seeds=5):
    func = get_function("rastrigin", 20)
    es = OptimizerConfig(mode="ES", gamma=1.0, alpha0=0.3, alpha_exp=0.6,
                         fixed_sample_size=100, antithetic=True)
    cem = OptimizerConfig(mode="CEM", sigma0=1.0, elite_frac=0.2, fixed_sample_size=100)
    print("\n20-D Rastrigin after 1000 iterations (lower is better)")
    for name, cfg in (("ES", es), ("CEM", cem)):
        finals = [trace(func, cfg, 1000, seed)[0][-1] for seed in range(seeds)]
        print(f"  {name:4s}  median {np.median(finals):7.2f}   per seed {np.round(finals, 1).tolist()}")


if __name__ == "__main__":
    sphere_race()
    rastrigin_race()
