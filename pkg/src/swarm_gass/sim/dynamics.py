"""Reduced-order vehicle models, integrated with explicit Euler.

Fixed-wing: coordinated-turn kinematics. The aileron sets a bank target that
roll follows with a first-order lag (rate-limited), the elevator does the same
for the flight-path angle, and throttle follows the thrust command. Speed
obeys ``dV/dt = accel_max * throttle - c_d V^2 - g sin(path)`` and the
heading turns at ``g tan(roll) / V`` plus a small rudder yaw rate.

Quadcopter: velocity follows the commanded velocity with a first-order lag
(acceleration-limited); roll and pitch are the tilt needed for that
acceleration, and yaw follows its command rate-limited.

Wind is added to the velocity used for the position update; control noise
is added to the commands before clamping.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidState
from ..policy.pid import wrap_angle
from .config import G, FixedWingParams, QuadParams, WorldConfig
from .state import (
    FW_HEADING, FW_P, FW_PATH, FW_Q, FW_ROLL, FW_SPEED, FW_THROTTLE,
    FIXED_WING, QUADCOPTER, AgentState, ControlCommand,
)


def clamp_controls(u):
    u = np.asarray(u, dtype=np.float64)
    lo = np.array([0.0, -1.0, -1.0, -1.0])
    hi = np.ones(4)
    return np.clip(u, lo, hi)


def fixed_wing_kernel(s, u, wind, p: FixedWingParams, dt: float):
    """Advance fixed-wing states ``s (..., >=10)`` by ``dt``; returns a new array.

    ``u`` are clamped controls (thrust, aileron, elevator, rudder) and ``wind``
    a world-frame velocity disturbance.
    """
    out = s.copy()
    v, psi, gam, phi, thr = (s[..., FW_SPEED], s[..., FW_HEADING], s[..., FW_PATH],
                             s[..., FW_ROLL], s[..., FW_THROTTLE])
    cg = np.cos(gam)
    vel = np.stack([v * cg * np.cos(psi), v * cg * np.sin(psi), v * np.sin(gam)], axis=-1)
    out[..., 0:3] = s[..., 0:3] + (vel + wind) * dt

    roll_rate = np.clip((u[..., 1] * p.bank_max - phi) / p.bank_tau,
                        -p.roll_rate_max, p.roll_rate_max)
    pitch_rate = np.clip((u[..., 2] * p.path_angle_max - gam) / p.path_tau,
                         -p.pitch_rate_max, p.pitch_rate_max)
    turn_rate = G * np.tan(phi) / v + p.yaw_rate_rudder * u[..., 3]
    accel = p.accel_max * thr - p.drag_coeff * v * v - G * np.sin(gam)

    out[..., FW_ROLL] = np.clip(phi + roll_rate * dt, -p.bank_max, p.bank_max)
    out[..., FW_PATH] = np.clip(gam + pitch_rate * dt, -p.path_angle_max, p.path_angle_max)
    out[..., FW_HEADING] = wrap_angle(psi + turn_rate * dt)
    out[..., FW_SPEED] = np.clip(v + accel * dt, p.v_min, p.v_max)
    out[..., FW_THROTTLE] = thr + (u[..., 0] - thr) * (dt / p.throttle_tau)
    out[..., FW_P] = roll_rate
    out[..., FW_Q] = pitch_rate
    return out


def quad_kernel(s, cmd, wind, p: QuadParams, dt: float):
    """Advance quadcopter states ``s (..., 12)``; ``cmd`` is ``(vx, vy, vz, yaw)``."""
    out = s.copy()
    v = s[..., 3:6]
    v_cmd = cmd[..., 0:3].copy()
    horiz = np.linalg.norm(v_cmd[..., 0:2], axis=-1, keepdims=True)
    v_cmd[..., 0:2] *= np.minimum(1.0, p.v_max / np.maximum(horiz, 1e-12))
    v_cmd[..., 2] = np.clip(v_cmd[..., 2], -p.vz_max, p.vz_max)
    accel = np.clip((v_cmd - v) / p.vel_tau, -p.accel_max, p.accel_max)
    out[..., 0:3] = s[..., 0:3] + (v + wind) * dt
    out[..., 3:6] = v + accel * dt

    yaw = s[..., 8]
    yaw_rate = np.clip(wrap_angle(cmd[..., 3] - yaw) / p.yaw_tau, -p.yaw_rate_max, p.yaw_rate_max)
    new_yaw = wrap_angle(yaw + yaw_rate * dt)
    c, sn = np.cos(new_yaw), np.sin(new_yaw)
    a_fwd = c * accel[..., 0] + sn * accel[..., 1]
    a_left = -sn * accel[..., 0] + c * accel[..., 1]
    roll = np.arctan2(a_left, G)
    pitch = np.arctan2(a_fwd, G)
    out[..., 9] = (roll - s[..., 6]) / dt
    out[..., 10] = (pitch - s[..., 7]) / dt
    out[..., 11] = yaw_rate
    out[..., 6] = roll
    out[..., 7] = pitch
    out[..., 8] = new_yaw
    return out


def _noise(noise_draw, size):
    if noise_draw is None:
        return np.zeros(3), np.zeros(size)
    wind, control = noise_draw
    return np.asarray(wind, dtype=np.float64), np.asarray(control, dtype=np.float64)


def step_fixed_wing(state: AgentState, controls: ControlCommand, config: WorldConfig,
                    noise_draw=None) -> AgentState:
    """One ``config.dt`` step.

    ``noise_draw`` is ``None`` or ``(wind (3,), control (4,))`` already scaled
    to physical units.
    """
    if state.kind != FIXED_WING:
        raise InvalidState("step_fixed_wing needs a fixed-wing state")
    if not np.all(np.isfinite(state.vector)):
        raise InvalidState("non-finite state vector")
    wind, cn = _noise(noise_draw, 4)
    u = clamp_controls(controls.as_array() + cn)
    vec = fixed_wing_kernel(state.vector, u, wind, config.fixed_wing, config.dt)
    return AgentState(FIXED_WING, vec, state.team, state.agent_id, state.alive)


def step_quadcopter(state: AgentState, command, config: WorldConfig, noise_draw=None) -> AgentState:
    """One step; ``command`` is ``(vx, vy, vz, yaw)`` (extra entries ignored)."""
    if state.kind != QUADCOPTER:
        raise InvalidState("step_quadcopter needs a quadcopter state")
    if not np.all(np.isfinite(state.vector)):
        raise InvalidState("non-finite state vector")
    wind, cn = _noise(noise_draw, 4)
    cmd = np.asarray(command, dtype=np.float64)[:4] + cn
    vec = quad_kernel(state.vector, cmd, wind, config.quad, config.dt)
    return AgentState(QUADCOPTER, vec, state.team, state.agent_id, state.alive)
