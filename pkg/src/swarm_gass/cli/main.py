"""``swarm-gass`` command line: train, eval, bench, replay-export.

Exit status: 0 on success, 2 for bad usage or configuration (the message
names the path or key), 1 for runtime failures such as a corrupt checkpoint
or an unwritable output path.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np
import yaml

from .. import bench
from ..errors import CheckpointError, ConfigError, InvalidArgument
from ..harness import Trainer, evaluate, train_selfplay, train_single
from ..policy.network import param_count
from ..seeding import EVAL, derive_seed
from ..sim.engine import run_episode
from ..sim.export import write_events_jsonl, write_trajectory_csv
from . import checkpoint as ckpt_io
from .config import RunConfig, dump_config, load_config

THREADS_ENV = "SWARM_GASS_THREADS"


def team_checkpoint_path(path, team: int, n_teams: int) -> Path:
    """``path`` itself for one learned team, else ``name.team<t>.ext``."""
    path = Path(path)
    if n_teams == 1:
        return path
    return path.with_name(f"{path.stem}.team{team}{path.suffix}")


def _parallelism(cfg: RunConfig, flag) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {env!r}", THREADS_ENV) from None
        if value < 1:
            raise ConfigError(f"{THREADS_ENV} must be >= 1", THREADS_ENV)
        return value
    return cfg.train.parallelism


def _resolve(args) -> RunConfig:
    cfg = load_config(args.config, args.set or ())
    train = cfg.train
    if getattr(args, "seed", None) is not None:
        train = dataclasses.replace(train, seed=args.seed)
    train = dataclasses.replace(train, parallelism=_parallelism(cfg, getattr(args, "parallelism", None)))
    cfg = dataclasses.replace(cfg, train=train)
    if getattr(args, "out", None) is not None:
        cfg = dataclasses.replace(cfg, output=dataclasses.replace(cfg.output, dir=args.out))
    return cfg


def _load_team_params(path, scenario, mode=None) -> dict:
    teams = scenario.learned_teams
    dim = param_count(scenario.policy_shape)
    out = {}
    for t in teams:
        ck = ckpt_io.load(team_checkpoint_path(path, t, len(teams)), expected_dim=dim)
        if mode is not None and ck.mode != mode:
            raise CheckpointError(f"checkpoint holds a {ck.mode} state, run is {mode}")
        out[t] = ck
    return out


def cmd_train(args) -> int:
    cfg = _resolve(args)
    tc = cfg.train_config()
    out_dir = Path(cfg.output.dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.yaml").write_text(dump_config(cfg))
    trainer = Trainer(tc)
    n_teams = len(trainer.teams)
    if n_teams not in (1, 2):
        raise ConfigError(f"scenario {tc.scenario!r} has no learned team", "scenario.name")
    if args.resume:
        cks = _load_team_params(args.resume, trainer.scenario, tc.optimizer.mode)
        trainer.optimizers = {
            t: cks[t].to_optimizer(tc.optimizer, tc.seed, trainer.optimizers[t].stream)
            for t in trainer.teams
        }
    ck_path = out_dir / cfg.output.checkpoint
    metrics = open(out_dir / cfg.output.metrics, "a" if args.resume else "w")

    def save_all(tr):
        for t, opt in tr.optimizers.items():
            ckpt_io.save(team_checkpoint_path(ck_path, t, n_teams), ckpt_io.Checkpoint.from_optimizer(opt))

    def on_iteration(tr, rec):
        metrics.write(json.dumps(rec.to_dict()) + "\n")
        metrics.flush()
        if tc.checkpoint_every and rec.k % tc.checkpoint_every == 0:
            save_all(tr)

    try:
        if n_teams == 1:
            train_single(tc, trainer, on_iteration)
        else:
            train_selfplay(tc, trainer, on_iteration)
    finally:
        metrics.close()
    save_all(trainer)
    print(json.dumps({"iterations": trainer.k, "checkpoint": str(ck_path)}))
    return 0


def _scenario(cfg: RunConfig):
    return cfg.train_config().build_scenario()


def cmd_eval(args) -> int:
    cfg = _resolve(args)
    scenario = _scenario(cfg)
    cks = _load_team_params(args.checkpoint, scenario)
    params = {t: c.center for t, c in cks.items()}
    out = {}
    for t in scenario.learned_teams:
        stats = evaluate(params, scenario, args.episodes, args.seed, team=t,
                         parallelism=cfg.train.parallelism, chunk_size=cfg.train.chunk_size)
        out[str(t)] = stats.to_dict()
    if args.trajectory:
        res = run_episode(scenario, params, derive_seed(args.seed, 0, EVAL), record=True)
        write_trajectory_csv(args.trajectory, res.trajectory)
    print(json.dumps({"episodes": args.episodes, "seed": args.seed, "teams": out}))
    return 0


def cmd_replay_export(args) -> int:
    cfg = _resolve(args)
    scenario = _scenario(cfg)
    cks = _load_team_params(args.checkpoint, scenario)
    params = {t: c.center for t, c in cks.items()}
    res = run_episode(scenario, params, args.seed, record=True)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = write_trajectory_csv(out / "trajectory.csv", res.trajectory)
    n_events = write_events_jsonl(out / "events.jsonl", res.events)
    print(json.dumps({"rows": rows, "events": n_events, "returns": res.returns.tolist()}))
    return 0


def cmd_bench(args) -> int:
    func = bench.get_function(args.function, args.dim)
    if args.mode not in bench.BENCH_DEFAULTS:
        raise InvalidArgument(f"unknown mode {args.mode!r}")
    base = bench.BENCH_DEFAULTS[args.mode]
    changes = {}
    for item in args.set or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, raw = item.split("=", 1)
        key = key.strip().removeprefix("optimizer.")
        if key not in {f.name for f in dataclasses.fields(base)}:
            raise ConfigError(f"unknown config key 'optimizer.{key}'", key)
        changes[key] = yaml.safe_load(raw)
    try:
        config = dataclasses.replace(base, **changes)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    for rec in bench.run_bench(func, config, args.iterations, args.seed):
        print(json.dumps(rec))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="swarm-gass", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="YAML run configuration")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config key, e.g. optimizer.gamma=0.05")
        sp.add_argument("--parallelism", type=int)

    t = sub.add_parser("train", help="train a policy")
    common(t)
    t.add_argument("--seed", type=int)
    t.add_argument("--resume", metavar="CHECKPOINT")
    t.add_argument("--out", metavar="DIR")
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="score a checkpoint")
    common(e)
    e.add_argument("--checkpoint", required=True)
    e.add_argument("--episodes", type=int, default=10)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--trajectory", metavar="CSV", help="also export one replay episode")
    e.set_defaults(func=cmd_eval)

    b = sub.add_parser("bench", help="run an optimizer on an analytic function")
    b.add_argument("--mode", default="ES", choices=sorted(bench.BENCH_DEFAULTS))
    b.add_argument("--function", default="sphere")
    b.add_argument("--dim", type=int, default=10)
    b.add_argument("--iterations", type=int, default=500)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--set", action="append", metavar="KEY=VALUE")
    b.set_defaults(func=cmd_bench)

    r = sub.add_parser("replay-export", help="write trajectory CSV and event JSONL for one episode")
    common(r)
    r.add_argument("--checkpoint", required=True)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", required=True, metavar="DIR")
    r.set_defaults(func=cmd_replay_export)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"swarm-gass: invalid config: {exc}", file=sys.stderr)
        return 2
    except InvalidArgument as exc:
        print(f"swarm-gass: {exc}", file=sys.stderr)
        return 2
    except CheckpointError as exc:
        print(f"swarm-gass: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"swarm-gass: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
