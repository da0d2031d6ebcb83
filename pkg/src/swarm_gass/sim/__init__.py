"""Multi-agent world: vehicle models, weapons, collisions, episodes."""

from .config import DefenderParams, FixedWingParams, QuadParams, WeaponSpec, WorldConfig
from .defender import QuadCommand, defender_kernel, defender_policy, ring_slots
from .dynamics import step_fixed_wing, step_quadcopter
from .engine import run_episode, run_episodes
from .state import FIXED_WING, QUADCOPTER, AgentState, ControlCommand, kinematics
from .weapons import ShotEvent, hit_probability, presented_area, weapons_check
from .world import Base, EpisodeResult, Event, WorldState, collision_check, compute_reward
