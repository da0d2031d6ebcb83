"""Built-in experiments: the base attack and the two-team match.

Arena layout at scale ``s`` (all lengths multiplied by ``sqrt(s)``, the
ceiling stays at 500 m): a ``2000 x 2000`` m square centred on the origin,
two bases 800 m apart on the diagonal. Team 0 always starts around base 0
and attacks base 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidArgument
from .policy.network import DESK_SHAPE, FULL_SHAPE
from .seeding import SPAWN, substream
from .sim.config import WorldConfig
from .sim.state import FIXED_WING, KINDS, QUADCOPTER, AgentState
from .sim.world import Base

LEARNED = "learned"
DEFENDER = "defender"

ARENA_SIDE = 2000.0
ARENA_HEIGHT = 500.0
BASE_SEPARATION = 800.0
BASE_RADIUS = 30.0
BASE_HEIGHT = 50.0
ATTACK_BOX = 100.0
ATTACK_ALT = (60.0, 120.0)
DEFEND_BOX = 50.0
DEFEND_ALT = (30.0, 50.0)


@dataclass(frozen=True)
class TeamSpec:
    count: int
    kind: str = FIXED_WING
    policy: str = LEARNED
    spawn_low: tuple = (0.0, 0.0, 0.0)
    spawn_high: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.count < 1:
            raise InvalidArgument(f"team count must be >= 1, got {self.count}")
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown vehicle kind {self.kind!r}")
        if self.policy not in (LEARNED, DEFENDER):
            raise InvalidArgument(f"unknown policy source {self.policy!r}")
        if self.policy == LEARNED and self.kind != FIXED_WING:
            raise InvalidArgument("learned teams must fly fixed-wing aircraft")
        if self.policy == DEFENDER and self.kind != QUADCOPTER:
            raise InvalidArgument("scripted defenders are quadcopters")
        if np.any(np.asarray(self.spawn_high) < np.asarray(self.spawn_low)):
            raise InvalidArgument("spawn box upper corner below lower corner")


@dataclass(frozen=True)
class ScenarioConfig:
    """Teams are numbered by position in ``teams``; ``bases[j]`` belongs to team ``bases[j].team``."""

    name: str
    teams: tuple
    bases: tuple
    arena: tuple = (ARENA_SIDE, ARENA_SIDE, ARENA_HEIGHT)
    world: WorldConfig = field(default_factory=WorldConfig)
    scale: float = 1.0
    policy_shape: tuple = FULL_SHAPE

    def __post_init__(self):
        if not self.scale > 0:
            raise InvalidArgument(f"scale must be > 0, got {self.scale}")
        half = np.array(self.arena[:2]) / 2
        for t in self.teams:
            lo, hi = np.asarray(t.spawn_low), np.asarray(t.spawn_high)
            if np.any(np.abs(lo[:2]) > half) or np.any(np.abs(hi[:2]) > half) \
                    or lo[2] < 0 or hi[2] > self.arena[2]:
                raise InvalidArgument("spawn box leaves the arena")

    @property
    def n_agents(self) -> int:
        return sum(t.count for t in self.teams)

    @property
    def learned_teams(self) -> list[int]:
        return [i for i, t in enumerate(self.teams) if t.policy == LEARNED]

    def agent_teams(self) -> np.ndarray:
        return np.concatenate([np.full(t.count, i) for i, t in enumerate(self.teams)])

    def home_base(self, team: int):
        return next((b for b in self.bases if b.team == team), None)

    def enemy_base(self, team: int):
        return next((b for b in self.bases if b.team != team), None)

    def with_world(self, **changes) -> "ScenarioConfig":
        return replace(self, world=replace(self.world, **changes))


def _counts(scale: float, *full):
    if not scale > 0:
        raise InvalidArgument(f"scale must be > 0, got {scale}")
    # round first so e.g. 50 * 0.1 does not become 6
    counts = [math.ceil(round(n * scale, 9)) for n in full]
    if min(counts) < 1:
        raise InvalidArgument(f"scale {scale} leaves an empty team")
    return counts


def _layout(scale: float):
    k = math.sqrt(scale)
    off = BASE_SEPARATION * k / (2 * math.sqrt(2))
    bases = (
        Base((-off, -off, 0.0), BASE_RADIUS, BASE_HEIGHT, team=0),
        Base((off, off, 0.0), BASE_RADIUS, BASE_HEIGHT, team=1),
    )
    return k, bases, (ARENA_SIDE * k, ARENA_SIDE * k, ARENA_HEIGHT)


def _box(center, half, alt):
    return ((center[0] - half, center[1] - half, alt[0]),
            (center[0] + half, center[1] + half, alt[1]))


def base_attack(scale: float = 1.0, defenders: bool = True, policy_shape=None,
                world: WorldConfig | None = None) -> ScenarioConfig:
    """Learned fixed-wing attackers (team 0) against scripted quadcopters (team 1).

    ``defenders=False`` drops the defending team, leaving an enemy-free world
    with the target base still in place.
    """
    n_att, n_def = _counts(scale, 50, 20)
    k, bases, arena = _layout(scale)
    lo, hi = _box(bases[0].position, ATTACK_BOX * k, ATTACK_ALT)
    teams = [TeamSpec(n_att, FIXED_WING, LEARNED, lo, hi)]
    if defenders:
        lo, hi = _box(bases[1].position, DEFEND_BOX * k, DEFEND_ALT)
        teams.append(TeamSpec(n_def, QUADCOPTER, DEFENDER, lo, hi))
    if policy_shape is None:
        policy_shape = FULL_SHAPE if scale >= 1 else DESK_SHAPE
    return ScenarioConfig("base_attack", tuple(teams), bases, arena, world or WorldConfig(),
                          scale, tuple(policy_shape))


def two_team(scale: float = 1.0, policy_shape=None, world: WorldConfig | None = None) -> ScenarioConfig:
    """Two learned fixed-wing teams, each defending its own base.

    Team 1's spawn box is team 0's reflected through the arena centre.
    """
    (n,) = _counts(scale, 50)
    k, bases, arena = _layout(scale)
    lo, hi = _box(bases[0].position, ATTACK_BOX * k, ATTACK_ALT)
    lo1 = (-hi[0], -hi[1], lo[2])
    hi1 = (-lo[0], -lo[1], hi[2])
    teams = (TeamSpec(n, FIXED_WING, LEARNED, lo, hi), TeamSpec(n, FIXED_WING, LEARNED, lo1, hi1))
    if policy_shape is None:
        policy_shape = FULL_SHAPE if scale >= 1 else DESK_SHAPE
    return ScenarioConfig("two_team", teams, bases, arena, world or WorldConfig(),
                          scale, tuple(policy_shape))


BUILTINS = {"base_attack": base_attack, "two_team": two_team}


def build(name: str, scale: float = 1.0, **kwargs) -> ScenarioConfig:
    if name == "base_attack_empty":
        return base_attack(scale, defenders=False, **kwargs)
    if name not in BUILTINS:
        raise InvalidArgument(f"unknown scenario {name!r}")
    return BUILTINS[name](scale, **kwargs)


def spawn_agents(config: ScenarioConfig, seed: int) -> list[AgentState]:
    """Uniform positions in each team's box, facing the enemy base at trim speed.

    Agent ids run consecutively through the teams in order. Draws come from
    the ``(seed, SPAWN)`` stream, one ``(count, 3)`` block per team.
    """
    rng = substream(seed, SPAWN)
    agents = []
    aid = 0
    v_trim = config.world.fixed_wing.v_trim
    for ti, team in enumerate(config.teams):
        lo, hi = np.asarray(team.spawn_low, float), np.asarray(team.spawn_high, float)
        pos = lo + (hi - lo) * rng.random((team.count, 3))
        target = config.enemy_base(ti)
        for p in pos:
            if target is not None:
                heading = math.atan2(target.position[1] - p[1], target.position[0] - p[0])
            else:
                heading = 0.0
            if team.kind == FIXED_WING:
                agents.append(AgentState.fixed_wing(p, v_trim, heading, throttle=config.world.fixed_wing.throttle_trim,
                                                    team=ti, agent_id=aid))
            else:
                agents.append(AgentState.quadcopter(p, yaw=heading, team=ti, agent_id=aid))
            aid += 1
    return agents
