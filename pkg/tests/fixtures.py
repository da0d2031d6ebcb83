"""Small shared scenarios for the simulation and CLI tests."""

import numpy as np

from swarm_gass.policy.network import init_params
from swarm_gass.scenarios import DEFENDER, LEARNED, ScenarioConfig, TeamSpec, _layout
from swarm_gass.seeding import INIT, substream
from swarm_gass.sim.config import WorldConfig
from swarm_gass.sim.state import FIXED_WING, QUADCOPTER

DUEL_SHAPE = (102, 8, 3)
DUEL_SEED = 9


def duel_scenario(episode_length=60.0):
    """Two attackers against one defender with the bases 160 m apart."""
    _, bases, arena = _layout(0.04)
    b0, b1 = bases[0].position, bases[1].position
    att = TeamSpec(2, FIXED_WING, LEARNED, (b0[0] - 20, b0[1] - 20, 60.0), (b0[0] + 20, b0[1] + 20, 90.0))
    dfd = TeamSpec(1, QUADCOPTER, DEFENDER, (b1[0] - 10, b1[1] - 10, 30.0), (b1[0] + 10, b1[1] + 10, 50.0))
    return ScenarioConfig("duel", (att, dfd), bases, arena, WorldConfig(episode_length=episode_length),
                          0.04, DUEL_SHAPE)


def duel_params():
    return init_params(DUEL_SHAPE, substream(3, INIT))


# ---- CLI fixtures ----

REPLAY_CONFIG = """\
scenario: {name: base_attack, scale: 0.1}
world: {episode_length: 20.0}
policy: {shape: [102, 4, 3]}
"""
REPLAY_SEED = 4


def replay_checkpoint():
    from swarm_gass.cli.checkpoint import Checkpoint

    theta = init_params((102, 4, 3), substream(11, INIT), gain=2.0)
    z = np.zeros_like(theta)
    return Checkpoint("ES", 0, theta, None, z, z.copy(), 0)


def random_config_dict(rng):
    """A raw config mapping touching a random subset of keys in every section."""
    d = {}
    if rng.random() < 0.8:
        mode = str(rng.choice(["ES", "GASS", "CEM"]))
        opt = {"mode": mode, "gamma": float(rng.uniform(1e-3, 1.0)),
               "alpha0": float(rng.uniform(1e-4, 1.0)), "antithetic": bool(rng.random() < 0.5),
               "rank_ties": str(rng.choice(["index", "average"]))}
        if rng.random() < 0.5:
            opt["fixed_sample_size"] = None
            opt["alpha_exp"] = float(rng.uniform(0, 0.4))
            opt["tau"] = float(rng.uniform(0.9, 2.0))
            opt["n0"] = int(rng.integers(2, 500))
        else:
            opt["fixed_sample_size"] = int(rng.integers(2, 1000))
        d["optimizer"] = {k: v for k, v in opt.items() if rng.random() < 0.7 or k == "mode"}
    if rng.random() < 0.7:
        d["scenario"] = {"name": str(rng.choice(["base_attack", "two_team"])),
                         "scale": float(rng.choice([0.04, 0.08, 0.1, 0.5, 1.0]))}
    if rng.random() < 0.7:
        dt = float(rng.choice([0.05, 0.1, 0.2]))
        d["world"] = {"dt": dt, "episode_length": dt * int(rng.integers(1, 3000)),
                      "wind_std": float(rng.uniform(0, 2)),
                      "weapon": {"max_range": float(rng.uniform(50, 500))},
                      "safety": {"min_altitude": float(rng.uniform(5, 50))},
                      "sensor_range": None if rng.random() < 0.5 else float(rng.uniform(10, 900))}
    if rng.random() < 0.6:
        d["policy"] = {"shape": [102] + [int(x) for x in rng.integers(1, 64, rng.integers(0, 3))] + [3],
                       "init_gain": float(rng.uniform(0.1, 3))}
    if rng.random() < 0.7:
        d["train"] = {"iterations": int(rng.integers(1, 500)), "seed": int(rng.integers(0, 2**40)),
                      "parallelism": int(rng.integers(1, 16)), "eval_every": int(rng.integers(0, 10)),
                      "common_random_numbers": bool(rng.random() < 0.5)}
    if rng.random() < 0.5:
        d["output"] = {"dir": f"runs/r{int(rng.integers(0, 1000))}", "metrics": "m.jsonl"}
    return d


def random_checkpoint(rng):
    from swarm_gass.cli.checkpoint import Checkpoint

    mode = str(rng.choice(["ES", "GASS", "CEM"]))
    n = int(rng.integers(1, 200))
    k = int(rng.integers(0, 2**40))
    # raw bit patterns cover subnormals, huge values and signed zeros
    draw = lambda: rng.integers(0, 2**64, n, dtype=np.uint64).view(np.float64)
    finite = lambda x: np.where(np.isfinite(x), x, 0.0)
    if mode == "ES":
        return Checkpoint(mode, k, finite(draw()), None, finite(draw()), np.abs(finite(draw())),
                          int(rng.integers(0, 2**40)))
    return Checkpoint(mode, k, finite(draw()), np.abs(finite(draw())) + 5e-324)


# ---- acceptance reporting ----

ACCEPTANCE = []


def report(number, ok, detail):
    """Record one acceptance criterion outcome; the summary hook prints them all."""
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}"
    ACCEPTANCE.append((number, line))
    print(line)
    return ok
