"""PID tracking of a relative heading target for the fixed-wing model.

Three loops feed four actuators:

* heading: bearing of the target in the yaw-aligned frame -> aileron, with
  rudder coordinated as a fixed fraction of the aileron command;
* altitude: the target's relative height -> elevator;
* speed: ``v_trim`` shifted toward ``v_max`` / ``v_min`` by the target's forward
  component -> thrust around its trim value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import R_MAX

# channel order in the controller memory
HEADING, ALTITUDE, SPEED = 0, 1, 2


@dataclass(frozen=True)
class PidGains:
    heading: tuple = (1.5, 0.0, 0.2)
    altitude: tuple = (0.06, 0.002, 0.03)
    speed: tuple = (0.1, 0.01, 0.0)
    integrator_limits: tuple = (0.5, 50.0, 20.0)
    rudder_coordination: float = 0.2
    throttle_trim: float = 0.5
    v_trim: float = 20.0
    v_min: float = 12.0
    v_max: float = 30.0
    r_max: float = R_MAX

    def gain_matrix(self) -> np.ndarray:
        return np.array([self.heading, self.altitude, self.speed], dtype=np.float64)


@dataclass(frozen=True)
class PidState:
    """Controller memory: integrators, last errors, and whether a step has run."""

    integral: np.ndarray
    prev_error: np.ndarray
    started: np.ndarray

    @classmethod
    def zeros(cls, shape=()) -> "PidState":
        shape = tuple(shape)
        return cls(np.zeros(shape + (3,)), np.zeros(shape + (3,)), np.zeros(shape, dtype=bool))


def wrap_angle(a):
    return (np.asarray(a) + np.pi) % (2.0 * np.pi) - np.pi


def pid_errors(target, speed, gains: PidGains):
    """Heading, altitude and speed errors for a local-frame target."""
    target = np.asarray(target, dtype=np.float64)
    x, y, z = target[..., 0], target[..., 1], target[..., 2]
    heading_err = np.arctan2(y, x)
    frac = np.clip(x / gains.r_max, -1.0, 1.0)
    v_des = np.where(frac >= 0, gains.v_trim + (gains.v_max - gains.v_trim) * frac,
                     gains.v_trim + (gains.v_trim - gains.v_min) * frac)
    return np.stack([heading_err, z, v_des - speed], axis=-1)


def pid_kernel(target, speed, gains: PidGains, state: PidState, dt: float):
    """Return ``(controls (..., 4), new_state)``; controls are thrust, aileron, elevator, rudder."""
    err = pid_errors(target, speed, gains)
    k = gains.gain_matrix()
    lim = np.asarray(gains.integrator_limits, dtype=np.float64)
    integral = np.clip(state.integral + err * dt, -lim, lim)
    diff = err - state.prev_error
    diff[..., HEADING] = wrap_angle(diff[..., HEADING])
    deriv = np.where(state.started[..., None], diff / dt, 0.0)
    u = k[:, 0] * err + k[:, 1] * integral + k[:, 2] * deriv
    aileron = np.clip(u[..., HEADING], -1.0, 1.0)
    elevator = np.clip(u[..., ALTITUDE], -1.0, 1.0)
    thrust = np.clip(gains.throttle_trim + u[..., SPEED], 0.0, 1.0)
    rudder = np.clip(gains.rudder_coordination * aileron, -1.0, 1.0)
    controls = np.stack([thrust, aileron, elevator, rudder], axis=-1)
    new_state = PidState(integral, err, np.ones_like(state.started, dtype=bool))
    return controls, new_state


def pid_control(target, state, gains: PidGains, dt: float, memory: PidState | None = None):
    """Controls for one fixed-wing agent.

    ``state`` is an :class:`~swarm_gass.sim.state.AgentState`. Returns
    ``(ControlCommand, PidState)``.
    """
    from ..sim.state import ControlCommand

    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if memory is None:
        memory = PidState.zeros()
    u, memory = pid_kernel(np.asarray(target, dtype=np.float64), np.asarray(state.speed),
                           gains, memory, dt)
    return ControlCommand(*(float(c) for c in u)), memory
