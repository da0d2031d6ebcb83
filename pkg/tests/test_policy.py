import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from swarm_gass.errors import InvalidArgument
from swarm_gass.policy import (
    FULL_SHAPE, PidGains, PidState, PolicyParams, SafetyConfig, encode_observation, forward,
    init_params, param_count, pid_control, safety_override,
)
from swarm_gass.policy.observation import ALLY_OFFSET, BASE_OFFSET, ENEMY_OFFSET, OBS_SIZE
from swarm_gass.policy.pid import pid_kernel, wrap_angle
from swarm_gass.policy.safety import to_local
from swarm_gass.sim.config import FixedWingParams
from swarm_gass.sim.dynamics import fixed_wing_kernel
from swarm_gass.sim.state import AgentState
from swarm_gass.sim.world import Base, WorldState


# ---- network ----

def test_param_count():
    assert param_count(FULL_SHAPE) == 71_003
    assert param_count([2, 2, 1]) == 9
    with pytest.raises(InvalidArgument):
        param_count([5])


def test_zero_params_zero_output():
    out = forward(PolicyParams.zeros(), np.random.default_rng(0).normal(size=102))
    assert out.tolist() == [0.0, 0.0, 0.0]


def test_hand_network():
    # W1 = [[1, 2], [-1, 0.5]], b1 = [0.1, -0.2], W2 = [[0.3], [-0.7]], b2 = [0.05]
    flat = np.array([1.0, 2.0, -1.0, 0.5, 0.1, -0.2, 0.3, -0.7, 0.05])
    x = np.array([0.4, -0.3])
    h1 = math.tanh(0.4 * 1.0 + -0.3 * -1.0 + 0.1)
    h2 = math.tanh(0.4 * 2.0 + -0.3 * 0.5 - 0.2)
    want = 500.0 * math.tanh(0.3 * h1 - 0.7 * h2 + 0.05)
    got = forward(PolicyParams(flat, (2, 2, 1)), x)
    assert got[0] == pytest.approx(want, abs=1e-12)


def test_forward_shape_errors():
    with pytest.raises(InvalidArgument):
        PolicyParams(np.zeros(8), (2, 2, 1))
    with pytest.raises(InvalidArgument):
        forward(PolicyParams.zeros((2, 2, 1)), np.zeros(3))


@settings(max_examples=50)
@given(st.integers(0, 2**31), st.floats(0.1, 100.0))
def test_forward_bounded(seed, scale):
    rng = np.random.default_rng(seed)
    shape = (102, 16, 3)
    p = PolicyParams(init_params(shape, rng, gain=scale), shape)
    obs = rng.normal(scale=scale, size=(4, 102))
    out = forward(p, obs)
    assert out.shape == (4, 3)
    assert np.all(np.abs(out) <= 500.0)
    assert np.array_equal(out, forward(p, obs))


# ---- observation ----

def _fixture_world():
    me = AgentState.fixed_wing([0.0, 0.0, 100.0], speed=20.0, heading=0.0, team=0, agent_id=0)
    ally = AgentState.fixed_wing([30.0, 40.0, 100.0], speed=20.0, heading=math.pi / 2,
                                 team=0, agent_id=1)
    enemy = AgentState.fixed_wing([100.0, 0.0, 80.0], speed=20.0, heading=math.pi,
                                  team=1, agent_id=2)
    bases = [Base((-100.0, 0.0, 0.0), team=0), Base((200.0, 0.0, 0.0), team=1)]
    return WorldState([me, ally, enemy], bases)


def test_observation_hand_fixture():
    obs = encode_observation(_fixture_world(), 0)
    want = np.zeros(102)
    want[0:9] = [1.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.8]
    want[ALLY_OFFSET:ALLY_OFFSET + 10] = [0.3, 0.4, 0.0, 0.5, -2.0, 2.0, 0.0, math.pi / 2, 0.0, 0.0]
    want[ENEMY_OFFSET:ENEMY_OFFSET + 7] = [1.0, 0.0, -0.2, math.hypot(100, 20) / 100, -4.0, 0.0, 0.0]
    want[BASE_OFFSET:BASE_OFFSET + 8] = [0.0, -1.0, -1.0, math.sqrt(2.0),
                                         0.0, 1.0, -1.0, math.hypot(200, 100) / 100]
    np.testing.assert_allclose(obs, want, atol=1e-12)


def test_observation_lone_agent():
    world = WorldState([AgentState.fixed_wing([5.0, 5.0, 60.0])], [Base((100.0, 0.0, 0.0), team=1)])
    obs = encode_observation(world, 0)
    assert obs.shape == (102,)
    assert np.all(obs[ALLY_OFFSET:BASE_OFFSET] == 0)
    assert np.all(obs[BASE_OFFSET:BASE_OFFSET + 4] == 0)  # no home base here
    assert obs[BASE_OFFSET + 7] > 0


def test_observation_nearest_five_allies():
    agents = [AgentState.fixed_wing([0.0, 0.0, 100.0], agent_id=0)]
    dists = [70.0, 10.0, 50.0, 30.0, 60.0, 20.0, 40.0]
    for i, d in enumerate(dists, start=1):
        agents.append(AgentState.fixed_wing([d, 0.0, 100.0], agent_id=i))
    obs = encode_observation(WorldState(agents), 0)
    slot_d = [obs[ALLY_OFFSET + 10 * s + 3] * 100 for s in range(5)]
    np.testing.assert_allclose(slot_d, [10.0, 20.0, 30.0, 40.0, 50.0])


def test_observation_tie_by_id_and_dead_excluded():
    agents = [AgentState.fixed_wing([0.0, 0.0, 100.0], agent_id=0),
              AgentState.fixed_wing([0.0, 20.0, 100.0], agent_id=2, heading=1.0),
              AgentState.fixed_wing([0.0, -20.0, 100.0], agent_id=1, heading=-1.0),
              AgentState.fixed_wing([5.0, 0.0, 100.0], agent_id=3, alive=False)]
    obs = encode_observation(WorldState(agents), 0)
    assert obs[ALLY_OFFSET + 1] == pytest.approx(-0.2)  # id 1 first
    assert obs[ALLY_OFFSET + 10 + 1] == pytest.approx(0.2)
    assert np.all(obs[ALLY_OFFSET + 20:ENEMY_OFFSET] == 0)


def test_observation_errors():
    world = _fixture_world()
    with pytest.raises(InvalidArgument):
        encode_observation(world, 9)
    world.agents[1].alive = False
    with pytest.raises(InvalidArgument):
        encode_observation(world, 1)


def test_observation_sensor_range():
    obs = encode_observation(_fixture_world(), 0, sensor_range=50.0)
    assert np.all(obs[ENEMY_OFFSET:BASE_OFFSET] == 0)


def _random_world(rng, n_allies, n_enemies):
    agents = []
    for i in range(1 + n_allies + n_enemies):
        team = 0 if i <= n_allies else 1
        if rng.random() < 0.3 and i > 0:
            agents.append(AgentState.quadcopter(rng.uniform(-500, 500, 3) + [0, 0, 500],
                                                velocity=rng.normal(size=3), yaw=rng.uniform(-3, 3),
                                                team=team, agent_id=i))
        else:
            agents.append(AgentState.fixed_wing(rng.uniform(-500, 500, 3) + [0, 0, 500],
                                                 speed=rng.uniform(12, 30), heading=rng.uniform(-3, 3),
                                                 path_angle=rng.uniform(-0.3, 0.3), team=team,
                                                 agent_id=i, alive=bool(i == 0 or rng.random() > 0.2)))
    bases = [Base(tuple(rng.uniform(-500, 500, 2)) + (0.0,), team=t) for t in (0, 1)]
    return WorldState(agents, bases)


@settings(max_examples=60)
@given(st.integers(0, 2**31), st.integers(0, 20), st.integers(0, 20))
def test_observation_length_finite(seed, na, ne):
    obs = encode_observation(_random_world(np.random.default_rng(seed), na, ne), 0)
    assert obs.shape == (OBS_SIZE,)
    assert np.all(np.isfinite(obs))


@settings(max_examples=30)
@given(st.integers(0, 2**31), st.floats(-math.pi, math.pi))
def test_observation_rotation_invariant(seed, angle):
    # rotating the whole world (bases included) about the vertical changes nothing
    rng = np.random.default_rng(seed)
    agents = [AgentState.fixed_wing(rng.uniform(-200, 200, 3) + [0, 0, 300], speed=20.0,
                                    heading=rng.uniform(-3, 3), team=int(i > 3), agent_id=i)
              for i in range(8)]
    bases = [Base((-300.0, 50.0, 0.0), team=0), Base((300.0, -50.0, 0.0), team=1)]
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
    turned = [AgentState.fixed_wing(rot @ a.position, 20.0, float(wrap_angle(a.vector[4] + angle)),
                                    team=a.team, agent_id=a.agent_id) for a in agents]
    tbases = [Base(tuple(rot @ np.array(b.position)), team=b.team) for b in bases]
    a = encode_observation(WorldState(agents, bases), 0)
    b = encode_observation(WorldState(turned, tbases), 0)
    d = a - b
    d[6] = wrap_angle(d[6])  # own yaw may land on either side of the +-pi seam
    assert np.all(np.abs(d) < 1e-9)


# ---- safety ----

def test_safety_pass_through():
    me = AgentState.fixed_wing([0.0, 0.0, 200.0])
    target = np.array([100.0, -40.0, 5.0])
    assert safety_override(target, me, []).tolist() == target.tolist()


def test_safety_climb():
    me = AgentState.fixed_wing([0.0, 0.0, 15.0])
    out = safety_override(np.array([100.0, 0.0, -50.0]), me, [])
    assert out[2] > 0
    assert out[:2].tolist() == [100.0, 0.0]
    diving = AgentState.fixed_wing([0.0, 0.0, 30.0], path_angle=-0.4)
    assert safety_override(np.array([1.0, 0.0, -50.0]), diving, [])[2] > 0


def test_safety_head_on():
    a = AgentState.fixed_wing([0.0, 0.0, 100.0], heading=0.0, agent_id=0)
    b = AgentState.fixed_wing([50.0, 0.0, 100.0], heading=math.pi, agent_id=1)
    # the pair is exactly coaxial, so offset one slightly to define "away"
    b.vector[1] = 1.0
    ta = safety_override(np.array([500.0, 0.0, 0.0]), a, [b])
    tb = safety_override(np.array([500.0, 0.0, 0.0]), b, [a])
    # a flies along +x and b along -x, so b's local frame is a's turned by pi;
    # in world terms a must head to -y and b to +y, away from the midpoint y=0.5
    assert ta[1] < 0
    assert -tb[1] > 0


def test_safety_exactly_coaxial_head_on():
    a = AgentState.fixed_wing([0.0, 0.0, 100.0], heading=0.0, agent_id=0)
    b = AgentState.fixed_wing([50.0, 0.0, 100.0], heading=math.pi, agent_id=1)
    ta = safety_override(np.array([500.0, 0.0, 0.0]), a, [b])
    tb = safety_override(np.array([500.0, 0.0, 0.0]), b, [a])
    # the right-turn bias breaks the symmetry: each turns to its own right
    assert ta[1] < 0 and tb[1] < 0
    # in world terms they split to opposite sides
    assert np.sign(ta[1]) != np.sign(-tb[1])


def test_safety_ignores_dead_neighbor():
    a = AgentState.fixed_wing([0.0, 0.0, 100.0])
    b = AgentState.fixed_wing([20.0, 0.0, 100.0], heading=math.pi, agent_id=1, alive=False)
    t = np.array([10.0, 2.0, 3.0])
    assert safety_override(t, a, [b]).tolist() == t.tolist()


def test_safety_config_validates():
    from swarm_gass.errors import ConfigError
    with pytest.raises(ConfigError):
        SafetyConfig(min_altitude=0.0)


vec3 = arrays(np.float64, 3, elements=st.floats(-600, 600))


@settings(max_examples=100)
@given(vec3, st.floats(1, 300), st.floats(-3, 3), st.floats(-0.4, 0.4),
       st.lists(st.tuples(st.floats(-40, 40), st.floats(-40, 40), st.floats(-20, 20),
                          st.floats(-3, 3)), max_size=4))
def test_safety_idempotent(target, z, heading, path, nbs):
    me = AgentState.fixed_wing([0.0, 0.0, z], heading=heading, path_angle=path)
    others = [AgentState.fixed_wing([x, y, z + dz], heading=h, agent_id=i + 1)
              for i, (x, y, dz, h) in enumerate(nbs)]
    once = safety_override(target, me, others)
    twice = safety_override(once, me, others)
    assert once.tolist() == twice.tolist()


# ---- PID ----

def test_pid_zero_error():
    g = PidGains()
    me = AgentState.fixed_wing([0.0, 0.0, 100.0], speed=g.v_trim)
    cmd, _ = pid_control([0.0, 0.0, 0.0], me, g, 0.1)
    assert cmd.aileron == 0 and cmd.elevator == 0 and cmd.rudder == 0
    assert cmd.thrust == pytest.approx(g.throttle_trim)


def test_pid_proportional_only():
    g = PidGains(heading=(0.8, 0.0, 0.0), altitude=(0.0, 0.0, 0.0), speed=(0.0, 0.0, 0.0))
    me = AgentState.fixed_wing([0.0, 0.0, 100.0], speed=g.v_trim)
    for e in (0.1, -0.4, 1.2, -2.5):
        cmd, _ = pid_control([100 * math.cos(e), 100 * math.sin(e), 0.0], me, g, 0.1)
        assert cmd.aileron == pytest.approx(float(np.clip(0.8 * e, -1, 1)), abs=1e-12)


def test_pid_rejects_bad_dt():
    with pytest.raises(ValueError):
        pid_control([1.0, 0.0, 0.0], AgentState.fixed_wing([0, 0, 100]), PidGains(), 0.0)


@pytest.mark.parametrize("psi_d", [math.pi / 6, math.pi / 2, -math.pi / 2, 3.0])
def test_pid_heading_step_response(psi_d):
    g, p = PidGains(), FixedWingParams()
    s = AgentState.fixed_wing([0.0, 0.0, 100.0]).vector
    mem = PidState.zeros()
    err = []
    for _ in range(300):
        goal = 500.0 * np.array([math.cos(psi_d), math.sin(psi_d), 0.0])
        u, mem = pid_kernel(to_local(goal, np.array(s[4])), s[3], g, mem, 0.1)
        s = fixed_wing_kernel(s, u, np.zeros(3), p, 0.1)
        err.append(abs(float(wrap_angle(s[4] - psi_d))))
    assert max(err[149:]) < math.radians(5.0)


@settings(max_examples=100)
@given(vec3, st.floats(0, 60), arrays(np.float64, 3, elements=st.floats(-1e4, 1e4)))
def test_pid_bounds(target, speed, integ):
    state = PidState(integ, np.zeros(3), np.array(True))
    u, new = pid_kernel(target * 1e3, speed, PidGains(), state, 0.1)
    assert 0 <= u[0] <= 1 and np.all(np.abs(u[1:]) <= 1)
    assert np.all(np.abs(new.integral) <= np.array(PidGains().integrator_limits))
