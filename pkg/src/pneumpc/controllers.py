"""The three pressure controllers plus a brute-force horizon oracle.

* MI-NMPC: solve the relaxed horizon problem (omega in [0,1]), round the
  relaxed modes at 0.5, re-solve with the modes pinned, apply the first
  stage.  The relaxed optimum lower-bounds the pinned one; if a local
  pinned solve ever lands below the relaxed value, the relaxed problem is
  re-descended from the pinned point, which restores the bound without
  touching the applied plan.
* NMPC: pick one mode for the whole horizon from the sign of the current
  error, then do just the pinned solve.
* PID: two gain sets (inflation/deflation) selected by the same error-sign
  rule, raw command mapped affinely onto the admissible duty range above
  the dead zone, conditional integration as anti-windup.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, replace

import numpy as np

from .nlp_solver import SolveOptions, solve_box_nlp, warm_start_shift
from .plant import PlantParams
from .transcription import DecisionVector, HorizonSpec, make_objective, rollout

__all__ = [
    "ControlAction",
    "HorizonSolution",
    "PidState",
    "heuristic_mode",
    "round_omega",
    "minmpc_step",
    "nmpc_step",
    "pid_step",
    "brute_force_miocp",
    "MiNmpcController",
    "NmpcController",
    "PidController",
]


@dataclass(frozen=True)
class ControlAction:
    """One applied control decision.

    u_applied always equals the selected mode's duty candidate; omega_rel
    is the stage-0 relaxed mode value (the mode itself for the baselines).
    degraded marks a fail-safe action taken after a failed solve.
    """

    mode: int
    u_applied: float
    u_I: float
    u_D: float
    omega_rel: float
    solve_ms: float = 0.0
    degraded: bool = False


@dataclass
class HorizonSolution:
    """Trajectories and diagnostics of one receding-horizon solve."""

    u_I: np.ndarray
    u_D: np.ndarray
    modes: np.ndarray          # pinned integer modes per stage
    omega_rel: np.ndarray      # relaxed modes before rounding
    states: np.ndarray         # predicted pressures under the pinned plan
    objective: float           # pinned-mode cost
    relaxed_objective: float
    status: str
    relaxed_status: str
    iters: int


@dataclass
class PidState:
    z: float = 0.0        # integral state, Pa*s
    e_prev: float = 0.0   # previous error, Pa
    gains_I: tuple = (0.002, 0.0008, 0.0)
    gains_D: tuple = (0.010, 0.001, 0.0)


def heuristic_mode(e) -> int:
    """Mode from the sign of the tracking error: inflate when e >= 0."""
    return 1 if e >= 0.0 else 0


def round_omega(omega_rel) -> int:
    """Standard rounding of a relaxed mode value (0.5 rounds up)."""
    return 1 if omega_rel >= 0.5 else 0


def _pinned_bounds(spec: HorizonSpec, modes):
    """Box bounds with the omega block pinned to the integer modes."""
    lo, hi = spec.lower(), spec.upper()
    m = np.asarray(modes, dtype=float)
    lo[2 * spec.n:] = m
    hi[2 * spec.n:] = m
    return lo, hi


def _solve(spec, params, z0: DecisionVector, opts, lo=None, hi=None):
    fun, grad = make_objective(spec, params)
    if lo is None:
        lo, hi = spec.lower(), spec.upper()
    return solve_box_nlp(fun, grad, z0.as_array(), lo, hi, opts)


def _failed(result) -> bool:
    return not np.isfinite(result.j_opt)


_MIN_DUTY_FALLBACK = "solver failure: previous mode at minimum duty"


def _degraded_action(spec: HorizonSpec, prev_mode, t_ms) -> ControlAction:
    lo_i, _, lo_d, _ = spec.bounds
    mode = 1 if prev_mode is None else int(prev_mode)
    u = lo_i if mode == 1 else lo_d
    return ControlAction(mode, u, lo_i, lo_d, float(mode), t_ms, degraded=True)


def minmpc_step(p_now, ref_window, prev: DecisionVector | None,
                params: PlantParams, spec: HorizonSpec,
                opts: SolveOptions | None = None, prev_mode=None):
    """One MI-NMPC control step: relaxed solve, rounding, pinned re-solve.

    Returns (ControlAction, HorizonSolution, relaxed DecisionVector for the
    next warm start).
    """
    t0 = time.perf_counter()
    spec = replace(spec, p0=float(p_now), p_ref=np.asarray(ref_window, dtype=float))
    opts = opts or SolveOptions()

    mid = DecisionVector.mid_box(spec)
    if prev is not None:
        # The relaxed problem has corner saddles: at omega = 0 with the
        # inflation valve shut, neither omega nor u_I has a first-order
        # pull (and symmetrically for deflation), so a warm start alone can
        # lock the mode.  Whenever the current error sign disagrees with
        # the warm plan's first mode, probe the opposite basin too.
        z_warm = warm_start_shift(prev, spec)
        starts = [z_warm]
        m_sign = heuristic_mode(spec.p_ref[0] - spec.p0)
        if round_omega(z_warm.omega[0]) != m_sign:
            starts.append(replace_omega(mid, m_sign))
    else:
        # Cold start: continuation from the penalty-free solve (that
        # landscape has no corner basins), both pure-mode mid-duty points,
        # and both idle points (pure mode, valves at the dead-zone edge).
        no_penalty = replace(spec, weights=(spec.weights[0], spec.weights[1], 0.0))
        pre = _solve(no_penalty, params, mid,
                     replace(opts, max_iters=min(opts.max_iters, 60)))
        lo_i, _, lo_d, _ = spec.bounds
        idle = DecisionVector(np.full(spec.n, lo_i), np.full(spec.n, lo_d),
                              np.zeros(spec.n))
        starts = [DecisionVector.from_array(pre.z_opt, spec.n),
                  replace_omega(mid, 1.0), replace_omega(mid, 0.0),
                  replace_omega(idle, 1.0), replace_omega(idle, 0.0)]

    relaxed = None
    for z0 in starts:
        res = _solve(spec, params, z0, opts)
        if relaxed is None or res.j_opt < relaxed.j_opt:
            relaxed = res
    if _failed(relaxed):
        return (_degraded_action(spec, prev_mode, _ms(t0)), None, prev)

    z_rel = DecisionVector.from_array(relaxed.z_opt, spec.n)
    modes = np.array([round_omega(w) for w in z_rel.omega])

    z_pin0 = DecisionVector(z_rel.u_I.copy(), z_rel.u_D.copy(),
                            modes.astype(float))
    lo, hi = _pinned_bounds(spec, modes)
    pinned = _solve(spec, params, z_pin0, opts, lo, hi)
    if _failed(pinned):
        return (_degraded_action(spec, prev_mode, _ms(t0)), None, prev)

    relaxed_j = relaxed.j_opt
    warm_next = z_rel
    if pinned.j_opt < relaxed_j:
        # pinned point is relaxed-feasible; descend from it to restore the
        # lower bound (can only improve the relaxed value)
        repair = _solve(spec, params,
                        DecisionVector.from_array(pinned.z_opt, spec.n), opts)
        if not _failed(repair) and repair.j_opt < relaxed_j:
            relaxed_j = repair.j_opt
            warm_next = DecisionVector.from_array(repair.z_opt, spec.n)

    z_fix = DecisionVector.from_array(pinned.z_opt, spec.n)
    states, _ = rollout(spec, z_fix, params)
    mode0 = int(modes[0])
    u_i0, u_d0 = float(z_fix.u_I[0]), float(z_fix.u_D[0])
    t_ms = _ms(t0)
    action = ControlAction(mode0, mode0 * u_i0 + (1 - mode0) * u_d0,
                           u_i0, u_d0, float(z_rel.omega[0]), t_ms)
    solution = HorizonSolution(z_fix.u_I, z_fix.u_D, modes, z_rel.omega,
                               states, pinned.j_opt, relaxed_j,
                               pinned.status, relaxed.status,
                               relaxed.iters + pinned.iters)
    return action, solution, warm_next


def nmpc_step(p_now, ref_now, ref_window, prev: DecisionVector | None,
              params: PlantParams, spec: HorizonSpec,
              opts: SolveOptions | None = None, prev_mode=None):
    """Heuristic-mode NMPC step: one pinned solve with a single mode.

    The mode for the whole horizon comes from the sign of the tracking
    error at the current instant (ref_now - p_now).
    """
    t0 = time.perf_counter()
    spec = replace(spec, p0=float(p_now), p_ref=np.asarray(ref_window, dtype=float))
    opts = opts or SolveOptions()
    mode = heuristic_mode(ref_now - p_now)
    modes = np.full(spec.n, mode)

    z0 = warm_start_shift(prev, spec)
    z0 = DecisionVector(z0.u_I, z0.u_D, modes.astype(float))
    lo, hi = _pinned_bounds(spec, modes)
    res = _solve(spec, params, z0, opts, lo, hi)
    if _failed(res):
        return _degraded_action(spec, prev_mode, _ms(t0)), None, prev

    z = DecisionVector.from_array(res.z_opt, spec.n)
    states, _ = rollout(spec, z, params)
    u_i0, u_d0 = float(z.u_I[0]), float(z.u_D[0])
    action = ControlAction(mode, mode * u_i0 + (1 - mode) * u_d0,
                           u_i0, u_d0, float(mode), _ms(t0))
    solution = HorizonSolution(z.u_I, z.u_D, modes, modes.astype(float),
                               states, res.j_opt, res.j_opt,
                               res.status, res.status, res.iters)
    return action, solution, z


def pid_step(p_now, p_ref_now, state: PidState, dt, bounds):
    """Dual-gain PID step with dead-zone mapping and conditional integration.

    The active mode's raw command (error in Pa) is clamped to [0, 100] and
    mapped affinely onto [u_min, u_max] of that mode, so raw 0 sits exactly
    at the dead-zone edge (zero opening).  The deflation loop is reverse
    acting: its valve must open as the error grows more negative, so the
    error signal enters it negated (with positive raw commands the mapping
    would otherwise pin the deflation valve shut).  The integral state is
    mode-specific: it resets when the mode flips, and it freezes while the
    command is saturated with the error still pushing outward.
    """
    t0 = time.perf_counter()
    e = p_ref_now - p_now
    mode = heuristic_mode(e)
    if mode != heuristic_mode(state.e_prev):
        state = replace(state, z=0.0)
    kp, ki, kd = state.gains_I if mode == 1 else state.gains_D
    lo_i, hi_i, lo_d, hi_d = bounds
    u_min, u_max = (lo_i, hi_i) if mode == 1 else (lo_d, hi_d)
    sign = 1.0 if mode == 1 else -1.0

    raw = sign * (kp * e + ki * state.z + kd * (e - state.e_prev) / dt)
    raw_clamped = min(max(raw, 0.0), 100.0)
    u = u_min + (u_max - u_min) / 100.0 * raw_clamped

    windup = (raw > 100.0 and sign * e > 0.0) or (raw < 0.0 and sign * e < 0.0)
    z_next = state.z if windup else state.z + e * dt
    new_state = replace(state, z=z_next, e_prev=e)

    u_i = u if mode == 1 else lo_i
    u_d = u if mode == 0 else lo_d
    action = ControlAction(mode, u, u_i, u_d, float(mode), _ms(t0))
    return action, new_state


def brute_force_miocp(spec: HorizonSpec, params: PlantParams,
                      opts: SolveOptions | None = None):
    """Exact small-horizon oracle: enumerate every integer mode sequence.

    Each of the 2^N sequences gets its own continuous solve (two starts:
    mid-box and minimum duty).  Returns (best modes, best DecisionVector,
    best objective).  Only sensible for N <= 6.
    """
    if spec.n > 6:
        raise ValueError(f"brute force limited to N <= 6, got {spec.n}")
    opts = opts or SolveOptions()
    lo_i, hi_i, lo_d, hi_d = spec.bounds
    n = spec.n
    best = (None, None, np.inf)
    for modes in itertools.product((0, 1), repeat=n):
        m = np.array(modes)
        lo, hi = _pinned_bounds(spec, m)
        for u_i0, u_d0 in ((0.5 * (lo_i + hi_i), 0.5 * (lo_d + hi_d)),
                           (lo_i, lo_d)):
            z0 = DecisionVector(np.full(n, u_i0), np.full(n, u_d0),
                                m.astype(float))
            res = _solve(spec, params, z0, opts, lo, hi)
            if res.j_opt < best[2]:
                best = (m, DecisionVector.from_array(res.z_opt, n), res.j_opt)
    return best


def _ms(t0):
    return (time.perf_counter() - t0) * 1e3


def replace_omega(dv: DecisionVector, value) -> DecisionVector:
    return DecisionVector(dv.u_I.copy(), dv.u_D.copy(),
                          np.full(dv.n, float(value)))


class MiNmpcController:
    """Stateful wrapper owning the warm start between control steps."""

    name = "minmpc"

    def __init__(self, params, spec, opts=None):
        self.params = params
        self.spec = spec
        self.opts = opts or SolveOptions()
        self._prev = None
        self._prev_mode = None
        self.last_solution = None

    def step(self, t, p_now, ref_now, ref_window, dt) -> ControlAction:
        action, solution, self._prev = minmpc_step(
            p_now, ref_window, self._prev, self.params, self.spec,
            self.opts, self._prev_mode)
        self._prev_mode = action.mode
        self.last_solution = solution
        return action


class NmpcController:
    """Heuristic-mode NMPC with receding-horizon warm start."""

    name = "nmpc"

    def __init__(self, params, spec, opts=None):
        self.params = params
        self.spec = spec
        self.opts = opts or SolveOptions()
        self._prev = None
        self._prev_mode = None
        self.last_solution = None

    def step(self, t, p_now, ref_now, ref_window, dt) -> ControlAction:
        action, solution, self._prev = nmpc_step(
            p_now, ref_now, ref_window, self._prev, self.params, self.spec,
            self.opts, self._prev_mode)
        self._prev_mode = action.mode
        self.last_solution = solution
        return action


class PidController:
    """Dual-gain PID; bounds shared with the MPC duty boxes."""

    def __init__(self, gains_I, gains_D, bounds, name="pid"):
        self.state = PidState(gains_I=tuple(gains_I), gains_D=tuple(gains_D))
        self.bounds = bounds
        self.name = name

    def step(self, t, p_now, ref_now, ref_window, dt) -> ControlAction:
        action, self.state = pid_step(p_now, ref_now, self.state, dt, self.bounds)
        return action
