"""Simulation parameters with their defaults."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from ..errors import ConfigError
from ..policy.pid import PidGains
from ..policy.safety import SafetyConfig

G = 9.81


@dataclass(frozen=True)
class FixedWingParams:
    v_min: float = 12.0
    v_max: float = 30.0
    v_trim: float = 20.0
    throttle_trim: float = 0.5
    # full-throttle acceleration; drag is sized so trim throttle holds v_trim
    accel_max: float = 8.0
    bank_max: float = math.radians(45.0)
    bank_tau: float = 0.5
    roll_rate_max: float = 1.5
    path_angle_max: float = math.radians(25.0)
    path_tau: float = 0.5
    pitch_rate_max: float = 0.8
    throttle_tau: float = 0.5
    yaw_rate_rudder: float = 0.1
    # ellipsoid semi-axes (m): along the nose, along the wing, vertical
    semi_axes: tuple = (1.0, 0.8, 0.3)

    @property
    def drag_coeff(self) -> float:
        return self.accel_max * self.throttle_trim / self.v_trim**2


@dataclass(frozen=True)
class QuadParams:
    v_max: float = 10.0
    vz_max: float = 4.0
    accel_max: float = 5.0
    vel_tau: float = 0.5
    yaw_rate_max: float = 1.5
    yaw_tau: float = 0.3
    semi_axes: tuple = (0.35, 0.35, 0.15)


@dataclass(frozen=True)
class WeaponSpec:
    half_angle: float = math.radians(15.0)
    max_range: float = 300.0
    fire_period: float = 0.5
    p_max: float = 0.8
    ref_area: float = 1.0

    def __post_init__(self):
        if not 0 < self.half_angle < math.pi / 2:
            raise ConfigError("weapon half_angle must be in (0, pi/2)", "half_angle")
        if not self.max_range > 0:
            raise ConfigError("weapon max_range must be > 0", "max_range")
        if not 0 < self.p_max <= 1:
            raise ConfigError("p_max must be in (0, 1]", "p_max")


@dataclass(frozen=True)
class DefenderParams:
    sensor_range: float = 200.0
    ring_radius: float = 60.0
    patrol_altitude: float = 40.0
    position_gain: float = 0.5
    altitude_gain: float = 1.0
    # teammates closer than separation_radius get pushed apart at up to
    # separation_gain * v_max
    separation_radius: float = 25.0
    separation_gain: float = 2.0


@dataclass(frozen=True)
class WorldConfig:
    dt: float = 0.1
    episode_length: float = 200.0
    wind_std: float = 0.5
    control_noise_std: float = 0.02
    # None: sense enemies at any range (nearest-5 truncation still applies)
    sensor_range: Optional[float] = None
    collision_radius: float = 3.0
    early_termination: bool = True
    fixed_wing: FixedWingParams = field(default_factory=FixedWingParams)
    quad: QuadParams = field(default_factory=QuadParams)
    weapon: WeaponSpec = field(default_factory=WeaponSpec)
    safety: SafetyConfig = field(default_factory=SafetyConfig)
    pid: PidGains = field(default_factory=PidGains)
    defender: DefenderParams = field(default_factory=DefenderParams)

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError("dt must be > 0", "dt")
        steps = self.episode_length / self.dt
        if self.episode_length <= 0 or abs(steps - round(steps)) > 1e-6:
            raise ConfigError(
                "episode_length must be a positive multiple of dt", "episode_length"
            )
        if self.wind_std < 0 or self.control_noise_std < 0:
            raise ConfigError("noise stddevs must be >= 0", "wind_std")

    @property
    def n_steps(self) -> int:
        return int(round(self.episode_length / self.dt))
