"""Scripted quadcopter base defender.

With no enemy inside sensor range a defender flies to its slot on a ring
around its home base (slots spaced evenly by defender index). Otherwise it
chases the closest enemy, holds that enemy's altitude and faces it so the
nose-cone weapon can fire. Live teammates closer than the separation radius
add a velocity pushing the pair apart, which keeps two defenders chasing
the same enemy from colliding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DefenderParams, QuadParams


@dataclass(frozen=True)
class QuadCommand:
    velocity: tuple
    yaw: float
    altitude: float
    target: int = -1

    def as_array(self) -> np.ndarray:
        return np.array([*self.velocity, self.yaw])


def ring_slots(base_pos, n: int, params: DefenderParams):
    """Slot positions ``(n, 3)`` and their outward-facing yaw angles ``(n,)``."""
    ang = 2.0 * np.pi * np.arange(n) / max(n, 1)
    slots = np.zeros((n, 3))
    slots[:, 0] = base_pos[0] + params.ring_radius * np.cos(ang)
    slots[:, 1] = base_pos[1] + params.ring_radius * np.sin(ang)
    slots[:, 2] = params.patrol_altitude
    return slots, ang


def defender_kernel(q_pos, slots, slot_yaw, enemy_pos, enemy_alive,
                    params: DefenderParams, quad: QuadParams, mates_alive=None):
    """Commands for defenders ``(E, D)`` against candidate enemies ``(E, M)``.

    ``q_pos`` holds the whole defending team; ``mates_alive`` ``(E, D)``
    (default all) says which of them count for separation.

    Returns ``(cmd (E, D, 4), altitude_ref (E, D), target (E, D))`` where the
    target is the index into the enemy axis or -1.
    """
    rel = enemy_pos[:, None, :, :] - q_pos[:, :, None, :]
    dist = np.linalg.norm(rel, axis=-1)
    key = np.where(enemy_alive[:, None, :] & (dist <= params.sensor_range), dist, np.inf)
    if key.shape[-1]:
        target = np.argmin(key, axis=-1)
        engaged = np.isfinite(np.take_along_axis(key, target[..., None], axis=-1)[..., 0])
    else:
        target = np.zeros(key.shape[:-1], dtype=int)
        engaged = np.zeros(key.shape[:-1], dtype=bool)

    safe_t = np.where(engaged, target, 0)
    if enemy_pos.shape[1]:
        t_pos = np.take_along_axis(enemy_pos[:, None, :, :], safe_t[..., None, None], axis=2)[:, :, 0]
    else:
        t_pos = q_pos
    slot_pos = np.broadcast_to(slots[None], q_pos.shape)
    goal = np.where(engaged[..., None], t_pos, slot_pos)
    delta = goal - q_pos
    horiz = delta[..., 0:2]
    chase = horiz * (quad.v_max / np.maximum(np.linalg.norm(horiz, axis=-1, keepdims=True), 1e-9))
    v_xy = np.where(engaged[..., None], chase, params.position_gain * horiz)
    alt_ref = goal[..., 2]
    vz = params.altitude_gain * (alt_ref - q_pos[..., 2])
    D = q_pos.shape[1]
    if D > 1:
        if mates_alive is None:
            mates_alive = np.ones(q_pos.shape[:2], dtype=bool)
        sep = q_pos[:, :, None, :] - q_pos[:, None, :, :]
        d = np.linalg.norm(sep, axis=-1)
        near = mates_alive[:, None, :] & ~np.eye(D, dtype=bool)[None] & (d < params.separation_radius)
        w = np.where(near, (params.separation_radius - d) / params.separation_radius
                     / np.maximum(d, 1e-9), 0.0)
        push = params.separation_gain * quad.v_max * np.einsum("edm,edmi->edi", w, sep)
        v_xy = v_xy + push[..., 0:2]
        vz = vz + push[..., 2]
    yaw = np.where(engaged, np.arctan2(horiz[..., 1], horiz[..., 0]), slot_yaw)
    cmd = np.concatenate([v_xy, vz[..., None], yaw[..., None]], axis=-1)
    return cmd, alt_ref, np.where(engaged, target, -1)


def defender_policy(quad_state, world, params: DefenderParams = DefenderParams(),
                    quad: QuadParams = QuadParams()) -> QuadCommand:
    """Command for one defender in a :class:`~swarm_gass.sim.world.WorldState`."""
    team_quads = sorted((a for a in world.agents if a.team == quad_state.team and a.is_quad),
                        key=lambda a: a.agent_id)
    j = [a.agent_id for a in team_quads].index(quad_state.agent_id)
    base = world.home_base(quad_state.team)
    center = base.position if base is not None else quad_state.position
    slots, slot_yaw = ring_slots(center, len(team_quads), params)
    q_pos = np.array([a.position for a in team_quads])[None]
    q_alive = np.array([a.alive for a in team_quads])[None]
    enemies = sorted((a for a in world.agents if a.team != quad_state.team), key=lambda a: a.agent_id)
    e_pos = np.array([a.position for a in enemies]).reshape(1, len(enemies), 3)
    e_alive = np.array([a.alive for a in enemies], dtype=bool).reshape(1, len(enemies))
    cmd, alt, tgt = defender_kernel(q_pos, slots, slot_yaw, e_pos, e_alive, params, quad, q_alive)
    t = int(tgt[0, j])
    return QuadCommand(tuple(cmd[0, j, :3]), float(cmd[0, j, 3]), float(alt[0, j]),
                       enemies[t].agent_id if t >= 0 else -1)
