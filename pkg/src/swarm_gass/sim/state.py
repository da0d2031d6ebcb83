"""State vector layouts and per-agent views.

Fixed-wing (10 reals)::

    x, y, z, speed, heading, path_angle, roll, roll_rate, pitch_rate, throttle

Quadcopter (12 reals)::

    x, y, z, vx, vy, vz, roll, pitch, yaw, roll_rate, pitch_rate, yaw_rate

Positions are metres in a z-up world frame, angles radians, heading measured
from +x toward +y. In batched arrays the state is stored padded to 12
columns; fixed-wing agents ignore the last two.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgument

FIXED_WING = "fixed_wing"
QUADCOPTER = "quadcopter"
KINDS = (FIXED_WING, QUADCOPTER)
STATE_SIZE = {FIXED_WING: 10, QUADCOPTER: 12}
PADDED = 12

# fixed-wing columns
FW_SPEED, FW_HEADING, FW_PATH, FW_ROLL, FW_P, FW_Q, FW_THROTTLE = 3, 4, 5, 6, 7, 8, 9
# quadcopter columns
Q_VEL = slice(3, 6)
Q_ATT = slice(6, 9)
Q_RATES = slice(9, 12)


@dataclass(frozen=True)
class ControlCommand:
    thrust: float = 0.5
    aileron: float = 0.0
    elevator: float = 0.0
    rudder: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.thrust, self.aileron, self.elevator, self.rudder])

    def clamped(self) -> "ControlCommand":
        return ControlCommand(
            float(np.clip(self.thrust, 0, 1)), float(np.clip(self.aileron, -1, 1)),
            float(np.clip(self.elevator, -1, 1)), float(np.clip(self.rudder, -1, 1)),
        )


def kinematics(states: np.ndarray, is_quad):
    """Position, world velocity, attitude (roll, pitch, yaw) and speed.

    ``states`` is ``(..., 12)``; ``is_quad`` broadcasts against ``states[..., 0]``.
    """
    s = np.asarray(states)
    is_quad = np.asarray(is_quad, dtype=bool)
    pos = s[..., 0:3]
    v, psi, gam = s[..., FW_SPEED], s[..., FW_HEADING], s[..., FW_PATH]
    cg = np.cos(gam)
    fw_vel = np.stack([v * cg * np.cos(psi), v * cg * np.sin(psi), v * np.sin(gam)], axis=-1)
    fw_att = np.stack([s[..., FW_ROLL], gam, psi], axis=-1)
    q = is_quad[..., None]
    vel = np.where(q, s[..., Q_VEL], fw_vel)
    att = np.where(q, s[..., Q_ATT], fw_att)
    speed = np.where(is_quad, np.linalg.norm(s[..., Q_VEL], axis=-1), v)
    return pos, vel, att, speed


@dataclass
class AgentState:
    """One agent. ``vector`` has length 10 (fixed-wing) or 12 (quadcopter)."""

    kind: str
    vector: np.ndarray
    team: int = 0
    agent_id: int = 0
    alive: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown vehicle kind {self.kind!r}")
        self.vector = np.asarray(self.vector, dtype=np.float64).reshape(-1)
        if self.vector.size != STATE_SIZE[self.kind]:
            raise InvalidArgument(
                f"{self.kind} state needs {STATE_SIZE[self.kind]} reals, got {self.vector.size}"
            )

    @property
    def is_quad(self) -> bool:
        return self.kind == QUADCOPTER

    def padded(self) -> np.ndarray:
        out = np.zeros(PADDED)
        out[: self.vector.size] = self.vector
        return out

    def _kin(self):
        return kinematics(self.padded(), self.is_quad)

    @property
    def position(self) -> np.ndarray:
        return self.vector[0:3].copy()

    @property
    def velocity(self) -> np.ndarray:
        return self._kin()[1]

    @property
    def attitude(self) -> np.ndarray:
        return self._kin()[2]

    @property
    def yaw(self) -> float:
        return float(self._kin()[2][2])

    @property
    def speed(self) -> float:
        return float(self._kin()[3])

    @classmethod
    def fixed_wing(cls, position, speed=20.0, heading=0.0, path_angle=0.0, roll=0.0,
                   throttle=0.5, team=0, agent_id=0, alive=True) -> "AgentState":
        vec = np.zeros(10)
        vec[0:3] = position
        vec[FW_SPEED], vec[FW_HEADING], vec[FW_PATH] = speed, heading, path_angle
        vec[FW_ROLL], vec[FW_THROTTLE] = roll, throttle
        return cls(FIXED_WING, vec, team, agent_id, alive)

    @classmethod
    def quadcopter(cls, position, velocity=(0.0, 0.0, 0.0), yaw=0.0, team=0, agent_id=0,
                   alive=True) -> "AgentState":
        vec = np.zeros(12)
        vec[0:3] = position
        vec[Q_VEL] = velocity
        vec[8] = yaw
        return cls(QUADCOPTER, vec, team, agent_id, alive)
