"""Batched episode runner.

Many independent episodes of one scenario are stepped together as arrays of
shape ``(episodes, agents, ...)``. Every episode owns its random streams,
keyed by its own seed, so an episode's result does not depend on which
other episodes share its batch.

Per step, in order: observations, policies, safety override, PID, scripted
defenders, dynamics, weapons, collisions, termination. Weapons resolve
simultaneously (every shot is taken from the same post-dynamics state; a
victim hit by several attackers is credited to the lowest attacker id).

Random draw layout for an episode with seed ``s`` (see
:mod:`swarm_gass.seeding`): spawn from ``(s, SPAWN)``; wind, control noise
and weapon uniforms from ``(s, WIND)``, ``(s, CONTROL)`` and
``(s, WEAPONS)``, drawn in blocks of ``NOISE_BLOCK`` steps laid out as
``(step, agent id, component)``. Every agent consumes its draws every step,
alive or not, so the layout is fixed.
"""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np

from ..errors import InvalidArgument, InvalidState
from ..policy.network import PolicyParams, forward_batch, param_count
from ..policy.observation import encode_kernel
from ..policy.pid import PidState, pid_kernel
from ..policy.safety import safety_kernel
from ..seeding import CONTROL, WEAPONS, WIND, substream
from .defender import defender_kernel, ring_slots
from .dynamics import clamp_controls, fixed_wing_kernel, quad_kernel
from .state import PADDED, kinematics
from .weapons import hit_probability, in_cone, nose_vector, presented_area
from .world import BASE, GROUND, KILL, MIDAIR, SHOT, EpisodeResult, Event, compute_reward

NOISE_BLOCK = 100


def _noise_blocks(rngs, A):
    wind = np.stack([r[0].standard_normal((NOISE_BLOCK, A, 3)) for r in rngs])
    ctrl = np.stack([r[1].standard_normal((NOISE_BLOCK, A, 4)) for r in rngs])
    draw = np.stack([r[2].random((NOISE_BLOCK, A)) for r in rngs])
    return wind, ctrl, draw


def _base_rows(scenario, teams, pick):
    rows = np.full((len(teams), 3), np.nan)
    for i, t in enumerate(teams):
        b = pick(int(t))
        if b is not None:
            rows[i] = b.position
    return rows


def _resolve_params(scenario, team_params, E):
    """Map each learned team to an ``(E, P)`` array."""
    learned = scenario.learned_teams
    P = param_count(scenario.policy_shape)
    if team_params is None:
        team_params = {}
    if not isinstance(team_params, Mapping):
        seq = list(team_params)
        if len(seq) == len(scenario.teams):
            team_params = {i: p for i, p in enumerate(seq) if p is not None}
        elif len(seq) == len(learned):
            team_params = dict(zip(learned, seq))
        else:
            raise InvalidArgument(
                f"expected parameters for {len(learned)} learned team(s), got {len(seq)}"
            )
    out = {}
    for t in learned:
        if t not in team_params or team_params[t] is None:
            raise InvalidArgument(f"learned team {t} has no policy parameters")
        p = team_params[t]
        p = np.asarray(p.flat if isinstance(p, PolicyParams) else p, dtype=np.float64)
        if p.shape[-1] != P:
            raise InvalidArgument(
                f"team {t}: parameter vector has length {p.shape[-1]}, policy shape "
                f"{tuple(scenario.policy_shape)} needs {P}"
            )
        if p.ndim == 1:
            p = np.broadcast_to(p, (E, P))
        elif p.shape != (E, P):
            raise InvalidArgument(f"team {t}: expected ({E}, {P}) parameters, got {p.shape}")
        out[t] = p
    extra = set(team_params) - set(learned)
    if extra:
        raise InvalidArgument(f"teams {sorted(extra)} are scripted and take no parameters")
    return out


def run_episodes(scenario, team_params, seeds, record: bool = False) -> list[EpisodeResult]:
    """Run one episode per seed. ``team_params`` rows may differ per episode.

    ``team_params`` maps learned team index to a parameter vector ``(P,)``
    (shared) or ``(E, P)`` (one per episode); a sequence over the learned
    teams is accepted too. With ``record`` each result carries a trajectory
    array with columns ``time, agent, team, x, y, z, alive`` (one row per
    agent alive at the start of a step; ``alive`` is whether it survived
    that step).
    """
    from ..scenarios import DEFENDER, spawn_agents

    seeds = [int(s) for s in seeds]
    E = len(seeds)
    if E == 0:
        return []
    params = _resolve_params(scenario, team_params, E)
    wc = scenario.world
    dt = wc.dt
    shape = tuple(scenario.policy_shape)

    team = scenario.agent_teams()
    A = team.size
    T = len(scenario.teams)
    is_quad = np.array([scenario.teams[t].kind == "quadcopter" for t in team])
    fw_idx = np.flatnonzero(~is_quad)
    fw_pos = np.full(A, -1)
    fw_pos[fw_idx] = np.arange(fw_idx.size)
    learned_idx = {t: np.flatnonzero(team == t) for t in params}
    home = _base_rows(scenario, team, scenario.home_base)
    enemy = _base_rows(scenario, team, scenario.enemy_base)
    enemy_mask = team[:, None] != team[None, :]
    semi = np.array([wc.quad.semi_axes if q else wc.fixed_wing.semi_axes for q in is_quad])
    bases = list(scenario.bases)

    defenders = []
    for t, spec in enumerate(scenario.teams):
        if spec.policy != DEFENDER:
            continue
        idx = np.flatnonzero(team == t)
        b = scenario.home_base(t)
        center = b.position if b is not None else np.zeros(3)
        slots, slot_yaw = ring_slots(center, idx.size, wc.defender)
        defenders.append((idx, np.flatnonzero(team != t), slots, slot_yaw))

    ctrl_scale = np.where(is_quad[:, None],
                          np.array([wc.quad.v_max, wc.quad.v_max, wc.quad.vz_max, 1.0]),
                          1.0) * wc.control_noise_std
    fire_steps = int(round(wc.weapon.fire_period / dt))

    states = np.zeros((E, A, PADDED))
    for e, s in enumerate(seeds):
        for a in spawn_agents(scenario, s):
            states[e, a.agent_id] = a.padded()
    rngs = [(substream(s, WIND), substream(s, CONTROL), substream(s, WEAPONS)) for s in seeds]
    alive = np.ones((E, A), dtype=bool)
    pid = PidState.zeros((E, fw_idx.size))
    last_fire = np.full((E, A), -10 ** 9)
    death_pos = np.zeros((E, A, 3))
    kills = np.zeros((E, T), dtype=int)
    base_hits = np.zeros((E, T), dtype=int)
    events = [[] for _ in range(E)]
    rows = [[] for _ in range(E)] if record else None
    results: list = [None] * E
    ep = np.arange(E)
    n_steps = wc.n_steps
    noise = None

    def finish(local, steps):
        pos = states[local, :, 0:3]
        out_dist = np.zeros(T)
        for t in range(T):
            members = team == t
            b = scenario.enemy_base(t)
            if b is None:
                continue
            live = alive[local] & members
            where = pos[live] if live.any() else death_pos[local][members]
            out_dist[t] = float(np.mean(np.linalg.norm(where - np.asarray(b.position), axis=-1)))
        k_, b_ = kills[local].copy(), base_hits[local].copy()
        g = ep[local]
        res = EpisodeResult(compute_reward(k_, b_, out_dist), k_, b_, out_dist,
                            events[g], steps, seeds[g])
        if record:
            res.trajectory = np.array(rows[g], dtype=np.float64).reshape(-1, 7)
        results[g] = res

    for k in range(n_steps):
        j = k % NOISE_BLOCK
        if j == 0:
            noise = _noise_blocks([rngs[g] for g in ep], A)
        wind = noise[0][:, j] * wc.wind_std
        cnoise = noise[1][:, j] * ctrl_scale
        draw = noise[2][:, j]
        t_now = round(k * dt, 10)
        t_next = round((k + 1) * dt, 10)

        pos, vel, att, speed = kinematics(states, is_quad[None])
        start_alive = alive.copy()
        start_pos = pos

        # policies -> safety -> PID for the fixed-wing agents
        target = np.zeros((len(ep), fw_idx.size, 3))
        for t, idx in learned_idx.items():
            obs = encode_kernel(pos, vel, att, speed, alive, team, idx, home, enemy,
                                wc.safety.min_altitude, wc.sensor_range)
            target[:, fw_pos[idx]] = forward_batch(params[t][ep], shape, obs, wc.pid.r_max)
        if fw_idx.size:
            nb_mask = alive[:, None, :] & (np.arange(A)[None, :] != fw_idx[:, None])[None]
            target = safety_kernel(
                target, pos[:, fw_idx], vel[:, fw_idx], att[:, fw_idx, 2],
                np.broadcast_to(pos[:, None], (len(ep), fw_idx.size, A, 3)),
                np.broadcast_to(vel[:, None], (len(ep), fw_idx.size, A, 3)),
                nb_mask, wc.safety, wc.pid.r_max,
            )
            controls, pid = pid_kernel(target, speed[:, fw_idx], wc.pid, pid, dt)
            u = clamp_controls(controls + cnoise[:, fw_idx])
            new_fw = fixed_wing_kernel(states[:, fw_idx], u, wind[:, fw_idx], wc.fixed_wing, dt)
        new_states = states.copy()
        if fw_idx.size:
            new_states[:, fw_idx] = new_fw
        for idx, foes, slots, slot_yaw in defenders:
            cmd, _, _ = defender_kernel(pos[:, idx], slots, slot_yaw, pos[:, foes], alive[:, foes],
                                        wc.defender, wc.quad, alive[:, idx])
            new_states[:, idx] = quad_kernel(states[:, idx], cmd + cnoise[:, idx], wind[:, idx],
                                             wc.quad, dt)
        states = np.where(alive[..., None], new_states, states)
        if not np.all(np.isfinite(states[alive])):
            raise InvalidState(f"non-finite state at step {k}")

        # weapons
        pos, vel, att, speed = kinematics(states, is_quad[None])
        rel = pos[:, None, :, :] - pos[:, :, None, :]
        dist = np.linalg.norm(rel, axis=-1)
        nose = nose_vector(att)
        eligible = (alive[:, None, :] & enemy_mask[None]
                    & in_cone(rel, dist, nose[:, :, None, :], wc.weapon))
        ready = alive & (k + 1 - last_fire >= fire_steps)
        key = np.where(eligible, dist, np.inf)
        tgt = np.argmin(key, axis=-1)
        fires = ready & np.isfinite(np.take_along_axis(key, tgt[..., None], axis=-1)[..., 0])
        hit_mat = None
        if fires.any():
            d = np.take_along_axis(dist, tgt[..., None], axis=-1)[..., 0]
            r = np.take_along_axis(rel, tgt[..., None, None], axis=2)[:, :, 0]
            view = -r / np.maximum(d, 1e-12)[..., None]
            t_att = np.take_along_axis(att, tgt[..., None], axis=1)
            prob = hit_probability(d, presented_area(view, t_att, semi[tgt]), wc.weapon)
            hit = fires & (draw < prob)
            last_fire = np.where(fires, k + 1, last_fire)
            hit_mat = hit[:, :, None] & (tgt[:, :, None] == np.arange(A)[None, None, :])
            for e, a in zip(*np.nonzero(fires)):
                events[ep[e]].append(Event(t_next, SHOT, int(a), int(tgt[e, a]), bool(hit[e, a])))
        if hit_mat is not None and hit_mat.any():
            victim = hit_mat.any(axis=1)
            killer = np.argmax(hit_mat, axis=1)
            for e, v in zip(*np.nonzero(victim)):
                a = int(killer[e, v])
                events[ep[e]].append(Event(t_next, KILL, a, int(v)))
                kills[e, team[a]] += 1
            alive = alive & ~victim

        # collisions: base, ground, mid-air
        in_base = np.zeros_like(alive)
        base_id = np.full(alive.shape, -1)
        for bi, b in enumerate(bases):
            bp = np.asarray(b.position)
            inside = (np.hypot(pos[..., 0] - bp[0], pos[..., 1] - bp[1]) <= b.radius) \
                & (pos[..., 2] <= bp[2] + b.height) & (team != b.team)[None] & alive & ~in_base
            base_id = np.where(inside, bi, base_id)
            in_base |= inside
        for e, a in zip(*np.nonzero(in_base)):
            events[ep[e]].append(Event(t_next, BASE, int(a), base=int(base_id[e, a])))
            base_hits[e, team[a]] += 1
        alive = alive & ~in_base
        ground = alive & (pos[..., 2] <= 0.0)
        for e, a in zip(*np.nonzero(ground)):
            events[ep[e]].append(Event(t_next, GROUND, int(a)))
        alive = alive & ~ground
        close = (dist <= wc.collision_radius) & np.triu(np.ones((A, A), dtype=bool), 1)[None]
        if (close & alive[:, :, None] & alive[:, None, :]).any():
            for i in range(A - 1):
                cand = close[:, i] & alive & alive[:, i:i + 1]
                hit_any = cand.any(axis=1)
                if not hit_any.any():
                    continue
                jdx = np.argmax(cand, axis=1)
                for e in np.flatnonzero(hit_any):
                    events[ep[e]].append(Event(t_next, MIDAIR, i, int(jdx[e])))
                    alive[e, i] = alive[e, jdx[e]] = False
        died = start_alive & ~alive
        death_pos[died] = pos[died]

        if record:
            for e in range(len(ep)):
                for a in np.flatnonzero(start_alive[e]):
                    x, y, z = start_pos[e, a]
                    rows[ep[e]].append((t_now, a, team[a], x, y, z, float(alive[e, a])))

        # termination
        done = np.full(len(ep), k + 1 >= n_steps)
        if wc.early_termination:
            per_team = np.stack([alive[:, team == t].any(axis=1) for t in range(T)], axis=1)
            done |= ~per_team.all(axis=1) if T > 1 else ~per_team[:, 0]
        if done.any():
            for e in np.flatnonzero(done):
                finish(e, k + 1)
            keep = ~done
            if not keep.any():
                break
            states, alive, last_fire, death_pos = states[keep], alive[keep], last_fire[keep], death_pos[keep]
            kills, base_hits, ep = kills[keep], base_hits[keep], ep[keep]
            pid = PidState(pid.integral[keep], pid.prev_error[keep], pid.started[keep])
            noise = tuple(n[keep] for n in noise)
    return results


def run_episode(scenario, team_params, seed: int, record: bool = False) -> EpisodeResult:
    return run_episodes(scenario, team_params, [seed], record)[0]
