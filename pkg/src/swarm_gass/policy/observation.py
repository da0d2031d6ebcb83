"""Encode what one agent sees into the 102-long policy input.

Layout (all vectors rotated into the observer's yaw-aligned frame, x forward,
y left, z up; lengths divided by ``LENGTH_SCALE``, velocities by
``SPEED_SCALE``):

====== ===== ==========================================================
slice  size  content
====== ===== ==========================================================
0:9    9     own: altitude, velocity (3), roll, pitch, yaw, speed,
             altitude above the safety floor
9:59   5x10  nearest allies: rel. position (3), distance, rel. velocity
             (3), rel. heading, roll, pitch
59:94  5x7   nearest enemies: rel. position (3), distance, rel. velocity (3)
94:102 2x4   home then enemy base: sin and cos of bearing, rel. altitude,
             distance
====== ===== ==========================================================

Slots are filled nearest first (ties by agent id); unused slots are zero.

The own yaw is measured from the bearing of the enemy base as seen from the
home base (from the world x axis when a team lacks either base), so the
whole vector is unchanged when the world is rotated about the vertical and
mirrored teams see mirrored inputs.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidArgument
from .pid import wrap_angle
from .safety import to_local

OBS_SIZE = 102
OWN_SIZE, ALLY_SIZE, ENEMY_SIZE, BASE_SIZE = 9, 10, 7, 4
N_SLOTS = 5
ALLY_OFFSET = OWN_SIZE
ENEMY_OFFSET = ALLY_OFFSET + N_SLOTS * ALLY_SIZE
BASE_OFFSET = ENEMY_OFFSET + N_SLOTS * ENEMY_SIZE
LENGTH_SCALE = 100.0
SPEED_SCALE = 10.0


def _nearest(mask, dist, k):
    """Indices of the ``k`` nearest masked entries along the last axis and their validity."""
    key = np.where(mask, dist, np.inf)
    n = key.shape[-1]
    if n < k:
        pad = np.full(key.shape[:-1] + (k - n,), np.inf)
        key = np.concatenate([key, pad], axis=-1)
    idx = np.argsort(key, axis=-1, kind="stable")[..., :k]
    valid = np.isfinite(np.take_along_axis(key, idx, axis=-1))
    return np.where(valid, idx, 0), valid


def _reference_yaw(home_base, enemy_base):
    """Per-agent bearing from home base to enemy base, 0 where either is missing."""
    h = np.asarray(home_base, dtype=np.float64)
    e = np.asarray(enemy_base, dtype=np.float64)
    ok = np.isfinite(h[:, 0]) & np.isfinite(e[:, 0])
    d = np.where(ok[:, None], e - h, 0.0)
    return np.where(ok, np.arctan2(d[:, 1], d[:, 0]), 0.0)


def _gather(a, idx):
    """``a`` is ``(E, A, F)``; ``idx`` is ``(E, O, K)`` -> ``(E, O, K, F)``."""
    E = a.shape[0]
    return a[np.arange(E)[:, None, None], idx]


def encode_kernel(pos, vel, att, speed, alive, team, observers, home_base, enemy_base,
                  min_altitude=20.0, sensor_range=None):
    """Observations for ``observers`` (agent indices) in each of ``E`` worlds.

    ``pos, vel, att`` are ``(E, A, 3)``, ``speed`` and ``alive`` ``(E, A)``,
    ``team`` ``(A,)``. ``home_base`` / ``enemy_base`` are ``(A, 3)`` base
    positions per agent, NaN rows where the base does not exist.
    Returns ``(E, O, 102)``.
    """
    obs_idx = np.asarray(observers, dtype=int)
    team = np.asarray(team)
    E, A = alive.shape
    O = obs_idx.size
    out = np.zeros((E, O, OBS_SIZE))
    if O == 0:
        return out
    p_o, v_o, att_o = pos[:, obs_idx], vel[:, obs_idx], att[:, obs_idx]
    yaw = att_o[..., 2]

    out[..., 0] = p_o[..., 2] / LENGTH_SCALE
    out[..., 1:4] = to_local(v_o, yaw) / SPEED_SCALE
    out[..., 4:7] = att_o
    out[..., 6] = wrap_angle(yaw - _reference_yaw(home_base, enemy_base)[obs_idx][None])
    out[..., 7] = speed[:, obs_idx] / SPEED_SCALE
    out[..., 8] = (p_o[..., 2] - min_altitude) / LENGTH_SCALE

    rel = pos[:, None, :, :] - p_o[:, :, None, :]
    dist = np.linalg.norm(rel, axis=-1)
    same = team[None, :] == team[obs_idx][:, None]
    not_self = np.arange(A)[None, :] != obs_idx[:, None]
    live = alive[:, None, :]
    ally_mask = live & (same & not_self)[None]
    enemy_mask = live & (~same)[None]
    if sensor_range is not None:
        enemy_mask = enemy_mask & (dist <= sensor_range)

    yaw_k = yaw[..., None]
    rel_vel = vel[:, None, :, :] - v_o[:, :, None, :]
    E_idx = np.arange(E)[:, None, None]
    O_idx = np.arange(O)[None, :, None]
    for mask, size, offset, ally in ((ally_mask, ALLY_SIZE, ALLY_OFFSET, True),
                                     (enemy_mask, ENEMY_SIZE, ENEMY_OFFSET, False)):
        idx, valid = _nearest(mask, dist, N_SLOTS)
        r = rel[E_idx, O_idx, idx]
        rv = rel_vel[E_idx, O_idx, idx]
        feat = [to_local(r, yaw_k) / LENGTH_SCALE,
                dist[E_idx, O_idx, idx][..., None] / LENGTH_SCALE,
                to_local(rv, yaw_k) / SPEED_SCALE]
        if ally:
            a_j = _gather(att, idx)
            feat += [wrap_angle(a_j[..., 2] - yaw_k)[..., None], a_j[..., 0:1], a_j[..., 1:2]]
        block = np.concatenate(feat, axis=-1) * valid[..., None]
        out[..., offset:offset + N_SLOTS * size] = block.reshape(E, O, N_SLOTS * size)

    for j, bases in enumerate((home_base, enemy_base)):
        b = np.asarray(bases, dtype=np.float64)[obs_idx]  # (O, 3)
        exists = np.isfinite(b[:, 0])
        rb = np.where(exists[:, None], b, 0.0)[None] - p_o
        lb = to_local(rb, yaw)
        bearing = np.arctan2(lb[..., 1], lb[..., 0])
        feat = np.stack([np.sin(bearing), np.cos(bearing), rb[..., 2] / LENGTH_SCALE,
                         np.linalg.norm(rb, axis=-1) / LENGTH_SCALE], axis=-1)
        o = BASE_OFFSET + j * BASE_SIZE
        out[..., o:o + BASE_SIZE] = feat * exists[None, :, None]
    return out


def encode_observation(world, agent_id: int, min_altitude: float = 20.0,
                       sensor_range=None) -> np.ndarray:
    """The 102-vector for ``agent_id`` in a :class:`~swarm_gass.sim.world.WorldState`."""
    from ..sim.state import kinematics

    agents = sorted(world.agents, key=lambda a: a.agent_id)
    ids = [a.agent_id for a in agents]
    if agent_id not in ids:
        raise InvalidArgument(f"unknown agent id {agent_id}")
    me = agents[ids.index(agent_id)]
    if not me.alive:
        raise InvalidArgument(f"agent {agent_id} is dead")
    states = np.array([a.padded() for a in agents])[None]
    is_quad = np.array([a.is_quad for a in agents])[None]
    pos, vel, att, speed = kinematics(states, is_quad)
    alive = np.array([a.alive for a in agents])[None]
    team = np.array([a.team for a in agents])

    def base_rows(pick):
        rows = []
        for a in agents:
            b = pick(a.team)
            rows.append(b.position if b is not None else (np.nan,) * 3)
        return np.array(rows, dtype=np.float64)

    out = encode_kernel(pos, vel, att, speed, alive, team, [ids.index(agent_id)],
                        base_rows(world.home_base), base_rows(world.enemy_base),
                        min_altitude, sensor_range)
    return out[0, 0]
