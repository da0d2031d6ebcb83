"""World snapshot, event log, reward and collision rules."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

KILL_REWARD = 10.0
BASE_REWARD = 50.0
DISTANCE_PENALTY = 1e-5

SHOT, KILL, GROUND, MIDAIR, BASE = "shot", "kill", "ground_collision", "midair_collision", "base_collision"


@dataclass(frozen=True)
class Base:
    """A vertical cylinder standing on the ground, owned by ``team``."""

    position: tuple
    radius: float = 30.0
    height: float = 50.0
    team: int = 0

    def contains(self, pos) -> bool:
        pos = np.asarray(pos, dtype=np.float64)
        horiz = np.hypot(pos[0] - self.position[0], pos[1] - self.position[1])
        return bool(horiz <= self.radius and pos[2] <= self.position[2] + self.height)


@dataclass(frozen=True)
class Event:
    time: float
    kind: str
    agent: int
    other: Optional[int] = None
    hit: Optional[bool] = None
    base: Optional[int] = None

    def to_dict(self) -> dict:
        d = {"t": round(self.time, 9), "type": self.kind}
        if self.kind == SHOT:
            d.update(attacker=self.agent, target=self.other, hit=self.hit)
        elif self.kind == KILL:
            d.update(victim=self.other, attacker=self.agent)
        elif self.kind == MIDAIR:
            d.update(a=self.agent, b=self.other)
        elif self.kind == BASE:
            d.update(agent=self.agent, base=self.base)
        else:
            d.update(agent=self.agent)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Event":
        kind = d["type"]
        if kind == SHOT:
            return cls(d["t"], kind, d["attacker"], d["target"], d["hit"])
        if kind == KILL:
            return cls(d["t"], kind, d["attacker"], d["victim"])
        if kind == MIDAIR:
            return cls(d["t"], kind, d["a"], d["b"])
        if kind == BASE:
            return cls(d["t"], kind, d["agent"], base=d["base"])
        return cls(d["t"], kind, d["agent"])


@dataclass
class TeamOutcome:
    kills: int = 0
    base_collisions: int = 0
    final_distance: float = 0.0
    ret: float = 0.0


@dataclass
class EpisodeResult:
    returns: np.ndarray
    kills: np.ndarray
    base_collisions: np.ndarray
    final_distance: np.ndarray
    events: list = field(default_factory=list)
    steps: int = 0
    seed: int = 0
    # (rows, 7): time, agent, team, x, y, z, alive; only when recorded
    trajectory: Optional[np.ndarray] = None

    def team(self, t: int) -> TeamOutcome:
        return TeamOutcome(int(self.kills[t]), int(self.base_collisions[t]),
                           float(self.final_distance[t]), float(self.returns[t]))

    def event_counts(self, teams) -> tuple[np.ndarray, np.ndarray]:
        """Kills and base collisions per team recounted from the event log."""
        n = int(max(teams)) + 1 if len(teams) else 0
        kills = np.zeros(n, dtype=int)
        base = np.zeros(n, dtype=int)
        for ev in self.events:
            if ev.kind == KILL:
                kills[teams[ev.agent]] += 1
            elif ev.kind == BASE:
                base[teams[ev.agent]] += 1
        return kills, base


def compute_reward(kills, base_collisions, final_distance_m):
    """``10 * kills + 50 * base collisions - 1e-5 * distance``."""
    return KILL_REWARD * kills + BASE_REWARD * base_collisions - DISTANCE_PENALTY * final_distance_m


@dataclass
class WorldState:
    """A single-episode snapshot used by the per-agent operations."""

    agents: list
    bases: list = field(default_factory=list)
    time: float = 0.0
    events: list = field(default_factory=list)

    def agent(self, agent_id: int):
        for a in self.agents:
            if a.agent_id == agent_id:
                return a
        return None

    def home_base(self, team: int) -> Optional[Base]:
        return next((b for b in self.bases if b.team == team), None)

    def enemy_base(self, team: int) -> Optional[Base]:
        return next((b for b in self.bases if b.team != team), None)


def collision_check(world: WorldState, collision_radius: float = 3.0) -> list[Event]:
    """Apply base, ground and mid-air collision rules in that order.

    Colliding agents are marked dead in ``world``; the events are returned
    (and appended to ``world.events``) in agent-id order within each rule.
    """
    events = []
    agents = sorted((a for a in world.agents if a.alive), key=lambda a: a.agent_id)
    for a in agents:
        for bi, base in enumerate(world.bases):
            if base.team != a.team and base.contains(a.position):
                a.alive = False
                events.append(Event(world.time, BASE, a.agent_id, base=bi))
                break
    for a in agents:
        if a.alive and a.position[2] <= 0.0:
            a.alive = False
            events.append(Event(world.time, GROUND, a.agent_id))
    for i, a in enumerate(agents):
        if not a.alive:
            continue
        for b in agents[i + 1:]:
            if b.alive and np.linalg.norm(a.position - b.position) <= collision_radius:
                a.alive = b.alive = False
                events.append(Event(world.time, MIDAIR, a.agent_id, b.agent_id))
                break
    world.events.extend(events)
    return events
