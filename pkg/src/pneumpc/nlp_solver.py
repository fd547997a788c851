"""Box-constrained smooth minimization: projected L-BFGS with Armijo backtracking.

Small and deterministic on purpose: the horizon problems are 30 variables
with box constraints only, solved at control rate, so a compact projected
quasi-Newton loop beats dragging in a general NLP stack.  Internally the
variables are normalized to the unit box (duty percentages and relaxed
modes differ by two orders of magnitude in both range and gradient scale,
and gradient projection without that scaling crawls).  The direction comes
from an L-BFGS two-loop recursion with gradient-projection fallback, the
step from backtracking on the projected arc, so every iterate is feasible
and accepted objective values decrease monotonically.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .transcription import DecisionVector, HorizonSpec

__all__ = [
    "SolveOptions",
    "SolveResult",
    "solve_box_nlp",
    "projected_gradient",
    "warm_start_shift",
]


@dataclass
class SolveOptions:
    max_iters: int = 200
    grad_tol: float = 1e-6      # infinity norm of the projected gradient
    step_tol: float = 1e-12     # minimum relative step before declaring a stall
    armijo_c: float = 1e-4
    memory: int = 10
    backtrack: float = 0.5
    max_backtracks: int = 30

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if min(self.grad_tol, self.step_tol) <= 0.0:
            raise ValueError("tolerances must be positive")
        if not 0.0 < self.armijo_c < 1.0:
            raise ValueError("armijo_c must be in (0,1)")


@dataclass
class SolveResult:
    z_opt: np.ndarray
    j_opt: float
    iters: int
    status: str  # converged | max_iters | stalled
    wall_time: float
    j_history: list = field(default_factory=list)


def projected_gradient(z, g, lower, upper):
    """Gradient with components pointing out of the box zeroed."""
    pg = np.array(g, dtype=float, copy=True)
    pg[(z <= lower) & (g > 0.0)] = 0.0
    pg[(z >= upper) & (g < 0.0)] = 0.0
    return pg


def _two_loop(g, s_list, y_list, rho_list):
    """Standard L-BFGS two-loop recursion, returns H*g."""
    q = g.copy()
    alphas = []
    for s, y, rho in zip(reversed(s_list), reversed(y_list), reversed(rho_list)):
        a = rho * s.dot(q)
        alphas.append(a)
        q -= a * y
    s, y = s_list[-1], y_list[-1]
    q *= s.dot(y) / y.dot(y)  # standard gamma scaling of the seed Hessian
    for (s, y, rho), a in zip(zip(s_list, y_list, rho_list), reversed(alphas)):
        b = rho * y.dot(q)
        q += (a - b) * s
    return q


def solve_box_nlp(objective, gradient, z0, lower, upper,
                  options: SolveOptions | None = None) -> SolveResult:
    """Minimize objective(z) subject to lower <= z <= upper.

    Parameters
    ----------
    objective, gradient : callables on flat numpy arrays (must be pure)
    z0 : starting point, projected onto the box before use
    lower, upper : bound arrays; equal entries pin a variable
    options : SolveOptions, defaults used when None

    Returns a SolveResult whose j_history lists the accepted objective
    values (monotone by construction).  Convergence is declared on the
    physical-units projected gradient; the search itself runs in unit-box
    coordinates.
    """
    opts = options or SolveOptions()
    t0 = time.perf_counter()
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    width = upper - lower
    free = width > 0.0
    scale = np.where(free, width, 1.0)
    c_lo = np.zeros(len(lower))
    c_hi = np.where(free, 1.0, 0.0)

    def to_z(c):
        return lower + c * scale

    c = np.clip((np.clip(z0, lower, upper) - lower) / scale, c_lo, c_hi)
    j = float(objective(to_z(c)))
    g = np.asarray(gradient(to_z(c)), dtype=float) * scale
    history = [j]

    s_list: list[np.ndarray] = []
    y_list: list[np.ndarray] = []
    rho_list: list[float] = []

    status = "max_iters"
    iters = 0
    tiny_step = False
    for iters in range(1, opts.max_iters + 1):
        active = ((c <= c_lo) & (g > 0.0)) | ((c >= c_hi) & (g < 0.0))
        pg = np.where(active, 0.0, g)
        if np.max(np.abs(pg / scale)) <= opts.grad_tol:  # physical units
            status = "converged"
            iters -= 1
            break
        if tiny_step:  # last accepted move was negligible yet pg is not small
            status = "stalled"
            iters -= 1
            break

        # quasi-Newton direction restricted to the free subspace; curvature
        # pairs straddling an active-set change are useless, so a failed
        # search flushes the memory and retries from steepest descent
        quasi_newton = bool(s_list)
        if quasi_newton:
            d = -_two_loop(pg, s_list, y_list, rho_list)
            d[active] = 0.0
            if d.dot(pg) >= 0.0:
                d = -pg
                quasi_newton = False
        else:
            d = -pg

        alpha0 = 1.0 if quasi_newton else 1.0 / max(1.0, np.max(np.abs(d)))
        c_new, j_new, ok = _search(objective, to_z, c, j, g, d,
                                   c_lo, c_hi, alpha0, opts)
        if not ok and s_list:
            s_list, y_list, rho_list = [], [], []
            d = -pg
            alpha0 = 1.0 / max(1.0, np.max(np.abs(d)))
            c_new, j_new, ok = _search(objective, to_z, c, j, g, d,
                                       c_lo, c_hi, alpha0, opts)
        if not ok:
            status = "stalled"
            break

        g_new = np.asarray(gradient(to_z(c_new)), dtype=float) * scale
        s = c_new - c
        y = g_new - g
        sy = s.dot(y)
        if sy > 1e-10 * np.linalg.norm(s) * np.linalg.norm(y):
            s_list.append(s)
            y_list.append(y)
            rho_list.append(1.0 / sy)
            if len(s_list) > opts.memory:
                s_list.pop(0)
                y_list.pop(0)
                rho_list.pop(0)

        tiny_step = np.max(np.abs(s)) < opts.step_tol
        c, j, g = c_new, j_new, g_new
        history.append(j)

    return SolveResult(to_z(c), j, iters, status,
                       time.perf_counter() - t0, history)


def _search(objective, to_z, c, j, g, d, c_lo, c_hi, alpha0, opts):
    """Backtracking Armijo search along the projected arc c(a) = P(c + a*d)."""
    alpha = alpha0
    for _ in range(opts.max_backtracks):
        c_new = np.clip(c + alpha * d, c_lo, c_hi)
        step = c_new - c
        if not step.any():
            return c, j, False  # projected step vanished, nothing reachable
        j_new = float(objective(to_z(c_new)))
        if j_new <= j + opts.armijo_c * g.dot(step):
            return c_new, j_new, True
        alpha *= opts.backtrack
    return c, j, False


def warm_start_shift(z_prev: DecisionVector | None, spec: HorizonSpec) -> DecisionVector:
    """Receding-horizon warm start: shift stages one step earlier.

    The last stage is duplicated and omega re-clamped to [0,1].  With no
    previous solution (first control step) the mid-box point with omega 0.5
    is returned instead.
    """
    if z_prev is None:
        return DecisionVector.mid_box(spec)

    def shift(a):
        out = np.empty_like(a)
        out[:-1] = a[1:]
        out[-1] = a[-1]
        return out

    return DecisionVector(shift(z_prev.u_I), shift(z_prev.u_D),
                          np.clip(shift(z_prev.omega), 0.0, 1.0))
