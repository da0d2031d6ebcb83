"""Rule layer that replaces the network's heading target near the ground or a neighbor.

Triggers depend only on the vehicle states, never on the incoming target,
so applying the override twice is the same as applying it once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from .network import R_MAX


@dataclass(frozen=True)
class SafetyConfig:
    min_altitude: float = 20.0
    avoid_radius: float = 10.0
    horizon: float = 3.0
    climb_margin: float = 10.0
    # weight of the right-hand turn added to a neighbor escape heading
    right_bias: float = 0.5

    def __post_init__(self):
        for name in ("min_altitude", "avoid_radius", "horizon", "climb_margin"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"safety {name} must be > 0", name)


def to_local(vec, yaw):
    """Rotate world-frame vectors into the yaw-aligned frame (x forward, y left, z up)."""
    c, s = np.cos(yaw)[..., None], np.sin(yaw)[..., None]
    x, y = vec[..., 0:1], vec[..., 1:2]
    return np.concatenate([c * x + s * y, -s * x + c * y, vec[..., 2:3]], axis=-1)


def to_world(vec, yaw):
    c, s = np.cos(yaw)[..., None], np.sin(yaw)[..., None]
    x, y = vec[..., 0:1], vec[..., 1:2]
    return np.concatenate([c * x - s * y, s * x + c * y, vec[..., 2:3]], axis=-1)


def safety_kernel(target, pos, vel, yaw, nb_pos, nb_vel, nb_mask,
                  cfg: SafetyConfig, r_max: float = R_MAX):
    """Vectorised override.

    Shapes: ``target, pos, vel`` are ``(..., 3)``, ``yaw`` is ``(...)``,
    ``nb_pos, nb_vel`` are ``(..., M, 3)`` and ``nb_mask`` ``(..., M)`` marks
    which neighbor slots are real. Returns the new target.
    """
    out = np.array(target, dtype=np.float64, copy=True)
    z = pos[..., 2]
    low = np.minimum(z, z + vel[..., 2] * cfg.horizon) < cfg.min_altitude
    climb = np.maximum(cfg.min_altitude + cfg.climb_margin - z, cfg.climb_margin)
    out[..., 2] = np.where(low, climb, out[..., 2])

    if nb_pos.shape[-2] == 0:
        return out
    r = nb_pos - pos[..., None, :]
    u = nb_vel - vel[..., None, :]
    uu = np.einsum("...i,...i->...", u, u)
    ru = np.einsum("...i,...i->...", r, u)
    with np.errstate(divide="ignore", invalid="ignore"):
        t_star = np.where(uu > 0, -ru / uu, 0.0)
    t_star = np.clip(t_star, 0.0, cfg.horizon)
    sep = r + u * t_star[..., None]
    d_min = np.linalg.norm(sep, axis=-1)
    threat = nb_mask & (d_min < cfg.avoid_radius)
    any_threat = threat.any(axis=-1)
    if not any_threat.any():
        return out
    dist_now = np.where(threat, np.linalg.norm(r, axis=-1), np.inf)
    nearest = np.argmin(dist_now, axis=-1)
    take = lambda a: np.take_along_axis(a, nearest[..., None, None], axis=-2)[..., 0, :]
    away = -take(sep)
    away[..., 2] = 0.0
    fallback = -take(r)
    fallback[..., 2] = 0.0
    small = np.linalg.norm(away, axis=-1) < 1e-6
    away = np.where(small[..., None], fallback, away)
    away_l = to_local(away, yaw)[..., :2]
    norm = np.linalg.norm(away_l, axis=-1, keepdims=True)
    away_l = np.where(norm > 1e-9, away_l / np.maximum(norm, 1e-12), 0.0)
    esc = away_l + np.array([0.0, -cfg.right_bias])
    esc = esc / np.linalg.norm(esc, axis=-1, keepdims=True)
    out[..., 0] = np.where(any_threat, r_max * esc[..., 0], out[..., 0])
    out[..., 1] = np.where(any_threat, r_max * esc[..., 1], out[..., 1])
    return out


def safety_override(target, self_state, neighbor_states, config: SafetyConfig = SafetyConfig()):
    """Apply the override for one agent.

    ``self_state`` and the entries of ``neighbor_states`` are
    :class:`~swarm_gass.sim.state.AgentState` values; dead neighbors are ignored.
    """
    nbs = [n for n in neighbor_states if n.alive]
    nb_pos = np.array([n.position for n in nbs]).reshape(len(nbs), 3)
    nb_vel = np.array([n.velocity for n in nbs]).reshape(len(nbs), 3)
    return safety_kernel(
        np.asarray(target, dtype=np.float64), self_state.position, self_state.velocity,
        np.asarray(self_state.yaw), nb_pos, nb_vel, np.ones(len(nbs), dtype=bool), config,
    )
