"""Two learned teams trained against each other.

    python3 demos/selfplay_two_teams.py [iterations]

Both teams fly the same airframe from mirrored spawn boxes, each with its own
ES optimizer. Each iteration pairs team 0's i-th perturbation with team 1's
i-th perturbation and gives both teams the same episode seeds, so neither
side sees the other's update until the iteration ends.

The quantity to watch is the gap between the two teams' median returns. An
edge one side picks up early tends to be answered by the other.
"""

import sys

import numpy as np

from swarm_gass.harness import TrainConfig, train_selfplay
from swarm_gass.search import OptimizerConfig

iterations = int(sys.argv[1]) if len(sys.argv) > 1 else 40
cfg = TrainConfig(OptimizerConfig(mode="ES", alpha0=0.03, gamma=0.05, fixed_sample_size=20),
                  scenario="two_team", scale=0.08, iterations=iterations, seed=0)
gaps = []


def progress(trainer, rec):
    m0, m1 = np.median(rec.returns[0]), np.median(rec.returns[1])
    gaps.append(abs(m0 - m1))
    print(f"k={rec.k:4d}  team0 {m0:7.2f}  team1 {m1:7.2f}  gap {gaps[-1]:6.2f}", flush=True)


train_selfplay(cfg, callback=progress)
w = min(10, len(gaps) // 2) or 1
print(f"\nmedian gap, first {w} iterations: {np.median(gaps[:w]):.2f}; last {w}: {np.median(gaps[-w:]):.2f}")
