"""Nose-cone weapons with a presented-area / range hit law.

The hit probability is ``p_max * (A / A_ref) * max(0, 1 - d / r_max)``
clamped to ``[0, 1]``, where ``A`` is the area of the target's body ellipsoid
projected onto the plane facing the attacker.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .config import WeaponSpec


@dataclass(frozen=True)
class ShotEvent:
    attacker: int
    target: int
    hit: bool
    probability: float


def body_axes(att):
    """Body x (nose), y (left), z (up) unit vectors for attitude ``(roll, pitch, yaw)``."""
    roll, pitch, yaw = att[..., 0], att[..., 1], att[..., 2]
    cp, sp, cy, sy = np.cos(pitch), np.sin(pitch), np.cos(yaw), np.sin(yaw)
    x = np.stack([cp * cy, cp * sy, sp], axis=-1)
    y0 = np.stack([-sy, cy, np.zeros_like(sy)], axis=-1)
    z0 = np.stack([-sp * cy, -sp * sy, cp], axis=-1)
    cr, sr = np.cos(roll)[..., None], np.sin(roll)[..., None]
    y = cr * y0 + sr * z0
    z = -sr * y0 + cr * z0
    return x, y, z


def nose_vector(att):
    return body_axes(att)[0]


def presented_area(view_dir, att, semi_axes):
    """Projected area of an ellipsoid seen along unit ``view_dir`` (world frame).

    For semi-axes ``(a, b, c)`` and the view direction ``(ux, uy, uz)`` in the
    body frame the area is ``pi * sqrt((b c ux)^2 + (a c uy)^2 + (a b uz)^2)``.
    """
    x, y, z = body_axes(att)
    semi = np.asarray(semi_axes, dtype=np.float64)
    a, b, c = semi[..., 0], semi[..., 1], semi[..., 2]
    ux = np.einsum("...i,...i->...", view_dir, x)
    uy = np.einsum("...i,...i->...", view_dir, y)
    uz = np.einsum("...i,...i->...", view_dir, z)
    return np.pi * np.sqrt((b * c * ux) ** 2 + (a * c * uy) ** 2 + (a * b * uz) ** 2)


def hit_probability(distance, area, spec: WeaponSpec):
    falloff = np.maximum(0.0, 1.0 - np.asarray(distance) / spec.max_range)
    return np.clip(spec.p_max * (np.asarray(area) / spec.ref_area) * falloff, 0.0, 1.0)


def in_cone(rel, dist, nose, spec: WeaponSpec):
    """Whether targets at ``rel`` (attacker to target) are inside the cone and in range."""
    along = np.einsum("...i,...i->...", rel, nose)
    return (dist > 0) & (dist <= spec.max_range) & (along >= dist * np.cos(spec.half_angle))


def weapons_check(attacker, candidates: Sequence, spec: WeaponSpec, rng_draw: float,
                  semi_axes: Optional[dict] = None) -> list[ShotEvent]:
    """Fire at the nearest eligible enemy among ``candidates``.

    ``attacker`` and ``candidates`` are :class:`~swarm_gass.sim.state.AgentState`;
    ``rng_draw`` is a uniform ``[0, 1)`` number, the shot hits when it falls
    below the hit probability. ``semi_axes`` maps vehicle kind to ellipsoid
    semi-axes (defaults from :mod:`swarm_gass.sim.config`). The cooldown is
    the caller's responsibility.
    """
    from .config import FixedWingParams, QuadParams

    if semi_axes is None:
        semi_axes = {"fixed_wing": FixedWingParams().semi_axes, "quadcopter": QuadParams().semi_axes}
    if not attacker.alive:
        return []
    nose = nose_vector(attacker.attitude)
    best = None
    for cand in candidates:
        if not cand.alive or cand.team == attacker.team:
            continue
        rel = cand.position - attacker.position
        d = float(np.linalg.norm(rel))
        if not in_cone(rel, d, nose, spec):
            continue
        if best is None or d < best[0] or (d == best[0] and cand.agent_id < best[1].agent_id):
            best = (d, cand, rel)
    if best is None:
        return []
    d, target, rel = best
    area = presented_area(-rel / d, target.attitude, semi_axes[target.kind])
    p = float(hit_probability(d, area, spec))
    return [ShotEvent(attacker.agent_id, target.agent_id, bool(rng_draw < p), p)]
