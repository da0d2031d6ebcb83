"""Heading network, observations, safety override and PID tracking."""

from .network import (
    DESK_SHAPE, FULL_SHAPE, R_MAX, PolicyParams, forward, forward_batch, init_params,
    param_count, unflatten,
)
from .observation import OBS_SIZE, encode_kernel, encode_observation
from .pid import PidGains, PidState, pid_control, pid_errors, pid_kernel, wrap_angle
from .safety import SafetyConfig, safety_kernel, safety_override, to_local, to_world
