"""Train a small fixed-wing swarm to attack a defended base.

    python3 demos/base_attack_training.py [iterations]

Five learned fixed-wing attackers face two quadcopter defenders that circle
their base. The policy is a single hidden layer (102 -> 32 -> 3) and the
optimizer is ES with ADAM. At first the attackers mostly loiter and the
score is the small negative distance term. Within a few dozen iterations
some of them learn to dive onto the base (+50 each) and the evaluation
median climbs in steps of tens.

After training, one evaluation episode is exported for replay.
"""

import sys
import tempfile
from pathlib import Path

import numpy as np

from swarm_gass.harness import TrainConfig, evaluate, train_single
from swarm_gass.scenarios import base_attack
from swarm_gass.search import OptimizerConfig
from swarm_gass.sim import run_episode
from swarm_gass.sim.export import write_events_jsonl, write_trajectory_csv

iterations = int(sys.argv[1]) if len(sys.argv) > 1 else 60
cfg = TrainConfig(OptimizerConfig(mode="ES", alpha0=0.01, gamma=0.05, fixed_sample_size=50),
                  scenario="base_attack", scale=0.1, iterations=iterations,
                  eval_every=10, eval_episodes=10, seed=0)


def progress(trainer, rec):
    line = f"k={rec.k:4d}  train median {np.median(rec.returns[0]):7.2f}  best {np.max(rec.returns[0]):7.2f}"
    if rec.eval:
        line += f"  | eval median {rec.eval[0].median:7.2f}"
    print(line, flush=True)


theta, _ = train_single(cfg, callback=progress)

sc = base_attack(0.1)
final = evaluate(theta, sc, 20, seed=123)
print(f"\nheld-out evaluation over 20 episodes: median {final.median:.2f}, "
      f"quartiles [{final.q25:.2f}, {final.q75:.2f}]")

res = run_episode(sc, {0: theta}, seed=123, record=True)
out = Path(tempfile.mkdtemp(prefix="base_attack_"))
write_trajectory_csv(out / "trajectory.csv", res.trajectory)
write_events_jsonl(out / "events.jsonl", res.events)
print(f"replay files written to {out}")
