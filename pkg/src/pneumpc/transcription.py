"""Direct single-shooting transcription of the relaxed horizon problem.

The binary mode is relaxed to omega in [0,1] and the dynamics are outer
convexified: each mode's gain multiplies its own channel's spool opening,

    dp/dt = f(p) + omega * g1(p) * x_bar(u_I) + (1-omega) * g0(p) * x_bar(u_D)

integrated with classical RK4 over each control step (smoothed flow law,
so the whole map is C1).  States are eliminated by forward rollout, which
leaves a box-constrained problem in (u_I, u_D, omega).  Gradients of the
total cost are exact: per-step sensitivities are chained through the RK4
stages and accumulated in reverse over the horizon.

Cost convention: the tracking error enters in kPa and the duty commands
enter normalized to [0, 1] (u/100), which is what makes the published
weight triple (q_e, r_I, lambda_bin) = (1, 1e-2, 1e2) reproduce the
published trade-offs: the input term is a light regularizer, the mode
penalty bites at ~25 per fractional stage, tracking dominates.  The error
of stage k is measured at the post-step state against the k-th reference
sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .plant import PlantParams, rate_scale, spool_map, spool_map_deriv

__all__ = [
    "HorizonSpec",
    "DecisionVector",
    "blended_rate",
    "rk4_step",
    "rollout",
    "gradient",
    "make_objective",
]

# published defaults: horizon, step, weights, duty bounds
DEFAULT_WEIGHTS = (1.0, 1e-2, 1e2)  # (q_e, r_I, lambda_bin)
DEFAULT_BOUNDS = (20.0, 100.0, 25.0, 100.0)  # (u_I_min, u_I_max, u_D_min, u_D_max)

# duty enters the cost normalized to [0, 1]
U_NORM = 1e-2


@dataclass
class HorizonSpec:
    """Everything one horizon solve needs besides the plant constants."""

    n: int = 10
    dt: float = 0.02
    p0: float = 100e3
    p_ref: np.ndarray = field(default_factory=lambda: np.full(10, 100e3))
    weights: tuple = DEFAULT_WEIGHTS
    bounds: tuple = DEFAULT_BOUNDS

    def __post_init__(self):
        self.p_ref = np.asarray(self.p_ref, dtype=float)
        if self.n < 1:
            raise ValueError(f"horizon length must be >= 1, got {self.n}")
        if self.dt <= 0.0:
            raise ValueError(f"control step must be positive, got {self.dt}")
        if len(self.p_ref) != self.n:
            raise ValueError(
                f"reference window has {len(self.p_ref)} entries, expected {self.n}")
        lo_i, hi_i, lo_d, hi_d = self.bounds
        if lo_i > hi_i or lo_d > hi_d:
            raise ValueError(f"duty bounds must be ordered, got {self.bounds}")

    def lower(self) -> np.ndarray:
        """Stacked lower bounds for (u_I, u_D, omega)."""
        lo_i, _, lo_d, _ = self.bounds
        return np.concatenate([
            np.full(self.n, lo_i), np.full(self.n, lo_d), np.zeros(self.n)])

    def upper(self) -> np.ndarray:
        _, hi_i, _, hi_d = self.bounds
        return np.concatenate([
            np.full(self.n, hi_i), np.full(self.n, hi_d), np.ones(self.n)])


@dataclass
class DecisionVector:
    """Per-stage decisions over the horizon: duties in %, omega in [0,1]."""

    u_I: np.ndarray
    u_D: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        self.u_I = np.asarray(self.u_I, dtype=float)
        self.u_D = np.asarray(self.u_D, dtype=float)
        self.omega = np.asarray(self.omega, dtype=float)
        if not len(self.u_I) == len(self.u_D) == len(self.omega):
            raise ValueError("decision blocks must share the horizon length")

    @property
    def n(self) -> int:
        return len(self.u_I)

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.u_I, self.u_D, self.omega])

    @classmethod
    def from_array(cls, z: np.ndarray, n: int) -> "DecisionVector":
        z = np.asarray(z, dtype=float)
        if len(z) != 3 * n:
            raise ValueError(f"flat vector has {len(z)} entries, expected {3 * n}")
        return cls(z[:n].copy(), z[n:2 * n].copy(), z[2 * n:].copy())

    @classmethod
    def mid_box(cls, spec: HorizonSpec) -> "DecisionVector":
        """Cold-start point: duty mid-range, omega at the unbiased 0.5."""
        lo_i, hi_i, lo_d, hi_d = spec.bounds
        n = spec.n
        return cls(np.full(n, 0.5 * (lo_i + hi_i)),
                   np.full(n, 0.5 * (lo_d + hi_d)),
                   np.full(n, 0.5))


# The rollout/gradient loop below is the innermost hot path of every solver
# iteration, so the four branch flows are evaluated inline from a flat tuple
# of constants instead of going through the plant-module helpers (which
# recompute all four flows per term).  The formulas are identical.

@lru_cache(maxsize=16)
def _model_consts(params: PlantParams, eps: float = 1e-3):
    k, c = params.flow, params.cond
    rr = k.rho_ref * k.temp_root
    return (params.p_sup, params.p_sink, params.p_atm, k.b,
            c.c_so * rr, c.c_os * rr, c.c_oa * rr, c.c_ao * rr,
            rate_scale(params), params.dz_I, params.dz_D,
            eps * eps)  # soft-clamp width of the smoothed shape factor


def _phi(r, b, d):
    """Smoothed shape factor (matches gas_flow.shape_factor_smoothed)."""
    s = (r - b) / (1.0 - b)
    if s <= 0.0:
        return 1.0
    if s >= 1.0:
        return 0.0
    if s <= 1.0 - d:
        return math.sqrt(1.0 - s * s)
    v = 1.0 - s
    sc = 1.0 - v ** 4 * (4.0 * d - 3.0 * v) / d ** 4
    return math.sqrt(max(1.0 - sc * sc, 0.0))


def _phi_pair(r, b, d):
    """(phi, dphi/dr) of the smoothed shape factor in one evaluation."""
    s = (r - b) / (1.0 - b)
    if s <= 0.0:
        return 1.0, 0.0
    if s >= 1.0:
        return 0.0, 0.0
    if s <= 1.0 - d:
        phi = math.sqrt(1.0 - s * s)
        return phi, -s / phi / (1.0 - b)
    v = 1.0 - s
    g = v ** 4 * (4.0 * d - 3.0 * v) / d ** 4
    gp = v ** 3 * (16.0 * d - 15.0 * v) / d ** 4
    sc = 1.0 - g
    phi = math.sqrt(max(1.0 - sc * sc, 0.0))
    if phi == 0.0:
        return 0.0, 0.0
    return phi, -sc * gp / phi / (1.0 - b)


def _rate(p, x_i, x_d, omega, mc):
    p_sup, p_snk, p_atm, b, k_so, k_os, k_oa, k_ao, scale, _, _, d = mc
    a_so = p_sup * k_so * _phi(p / p_sup, b, d)
    a_os = p * k_os * _phi(p_snk / p, b, d)
    a_oa = p * k_oa * _phi(p_atm / p, b, d)
    a_ao = p_atm * k_ao * _phi(p / p_atm, b, d)
    leak = a_ao - a_oa
    return scale * (leak + omega * x_i * (a_so - leak)
                    + (1.0 - omega) * x_d * (-a_os - leak))


def blended_rate(p, u_I, u_D, omega, params: PlantParams):
    """Outer-convexified pressure rate (Pa/s), smoothed flow law."""
    mc = _model_consts(params)
    return _rate(p, spool_map(u_I, mc[9]), spool_map(u_D, mc[10]), omega, mc)


def _rate_and_partials(p, x_i, x_d, omega, mc):
    """Rate F plus (dF/dp, dF/dx_i, dF/dx_d, dF/domega) at one point.

    Note the input partials are w.r.t. the spool openings; the chain to the
    duty percentages happens once per stage, not per RK4 substage.
    """
    p_sup, p_snk, p_atm, b, k_so, k_os, k_oa, k_ao, scale, _, _, d = mc
    phi, dphi = _phi_pair(p / p_sup, b, d)
    a_so = p_sup * k_so * phi
    d_so = k_so * dphi
    r = p_snk / p
    phi, dphi = _phi_pair(r, b, d)
    a_os = p * k_os * phi
    d_os = k_os * (phi - r * dphi)
    r = p_atm / p
    phi, dphi = _phi_pair(r, b, d)
    a_oa = p * k_oa * phi
    d_oa = k_oa * (phi - r * dphi)
    phi, dphi = _phi_pair(p / p_atm, b, d)
    a_ao = p_atm * k_ao * phi
    d_ao = k_ao * dphi

    leak = a_ao - a_oa
    dleak = d_ao - d_oa
    gain1 = a_so - leak
    gain0 = -a_os - leak
    rate = scale * (leak + omega * x_i * gain1 + (1.0 - omega) * x_d * gain0)
    d_p = scale * (dleak + omega * x_i * (d_so - dleak)
                   + (1.0 - omega) * x_d * (-d_os - dleak))
    return (rate, d_p, scale * omega * gain1,
            scale * (1.0 - omega) * gain0, scale * (x_i * gain1 - x_d * gain0))


def _rk4(p, x_i, x_d, omega, dt, mc):
    h = dt
    k1 = _rate(p, x_i, x_d, omega, mc)
    k2 = _rate(p + 0.5 * h * k1, x_i, x_d, omega, mc)
    k3 = _rate(p + 0.5 * h * k2, x_i, x_d, omega, mc)
    k4 = _rate(p + h * k3, x_i, x_d, omega, mc)
    return p + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_step(p, u_I, u_D, omega, dt, params: PlantParams):
    """Classical RK4 step of the blended dynamics."""
    mc = _model_consts(params)
    return _rk4(p, spool_map(u_I, mc[9]), spool_map(u_D, mc[10]), omega, dt, mc)


def _rk4_partials(p, x_i, x_d, omega, dt, mc):
    """RK4 step plus exact partials w.r.t. (p, x_i, x_d, omega).

    Stage sensitivities are chained in the same order the stages are
    evaluated; everything is scalar so this stays cheap.
    """
    h = dt
    k1, a1, bi1, bd1, w1 = _rate_and_partials(p, x_i, x_d, omega, mc)
    k2, a2, bi2, bd2, w2 = _rate_and_partials(p + 0.5 * h * k1, x_i, x_d, omega, mc)
    k3, a3, bi3, bd3, w3 = _rate_and_partials(p + 0.5 * h * k2, x_i, x_d, omega, mc)
    k4, a4, bi4, bd4, w4 = _rate_and_partials(p + h * k3, x_i, x_d, omega, mc)

    p_next = p + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    # d k_i / dp
    dk1 = a1
    dk2 = a2 * (1.0 + 0.5 * h * dk1)
    dk3 = a3 * (1.0 + 0.5 * h * dk2)
    dk4 = a4 * (1.0 + h * dk3)
    d_p = 1.0 + h / 6.0 * (dk1 + 2.0 * dk2 + 2.0 * dk3 + dk4)

    # d k_i / dtheta for each input channel theta
    e1, f1, g1 = bi1, bd1, w1
    e2 = bi2 + a2 * 0.5 * h * e1
    f2 = bd2 + a2 * 0.5 * h * f1
    g2 = w2 + a2 * 0.5 * h * g1
    e3 = bi3 + a3 * 0.5 * h * e2
    f3 = bd3 + a3 * 0.5 * h * f2
    g3 = w3 + a3 * 0.5 * h * g2
    e4 = bi4 + a4 * h * e3
    f4 = bd4 + a4 * h * f3
    g4 = w4 + a4 * h * g3
    d_xi = h / 6.0 * (e1 + 2.0 * e2 + 2.0 * e3 + e4)
    d_xd = h / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4)
    d_w = h / 6.0 * (g1 + 2.0 * g2 + 2.0 * g3 + g4)
    return p_next, d_p, d_xi, d_xd, d_w


def _as_decision(z, n) -> DecisionVector:
    if isinstance(z, DecisionVector):
        return z
    return DecisionVector.from_array(z, n)


def rollout(spec: HorizonSpec, z, params: PlantParams):
    """Forward rollout: predicted states P_1..P_N and total cost J.

    J = sum_k q_e*e_k^2 + r_I*(w_k v_I,k^2 + (1-w_k) v_D,k^2)
              + lambda_bin*w_k*(1-w_k),
    with e_k = (P_{k+1} - P_ref,k) in kPa and v = u/100 the normalized duty.
    """
    dv = _as_decision(z, spec.n)
    mc = _model_consts(params)
    q_e, r_i, lam = spec.weights
    dz_i, dz_d = mc[9], mc[10]
    p = spec.p0
    states = np.empty(spec.n)
    total = 0.0
    u_is, u_ds, ws, refs = dv.u_I, dv.u_D, dv.omega, spec.p_ref
    for k in range(spec.n):
        u_i, u_d, w = u_is[k] * U_NORM, u_ds[k] * U_NORM, ws[k]
        p = _rk4(p, spool_map(u_is[k], dz_i), spool_map(u_ds[k], dz_d), w,
                 spec.dt, mc)
        states[k] = p
        e_kpa = (p - refs[k]) * 1e-3
        total += (q_e * e_kpa * e_kpa
                  + r_i * (w * u_i * u_i + (1.0 - w) * u_d * u_d)
                  + lam * w * (1.0 - w))
    return states, total


def gradient(spec: HorizonSpec, z, params: PlantParams) -> np.ndarray:
    """Exact dJ/dz, reverse accumulation through the RK4 recursion."""
    dv = _as_decision(z, spec.n)
    mc = _model_consts(params)
    q_e, r_i, lam = spec.weights
    dz_i, dz_d = mc[9], mc[10]
    n = spec.n
    p = spec.p0
    states = np.empty(n)
    parts = []
    for k in range(n):
        u_i, u_d = dv.u_I[k], dv.u_D[k]
        x_i, x_d = spool_map(u_i, dz_i), spool_map(u_d, dz_d)
        p, d_p, d_xi, d_xd, d_w = _rk4_partials(
            p, x_i, x_d, dv.omega[k], spec.dt, mc)
        states[k] = p
        parts.append((d_p,
                      d_xi * spool_map_deriv(u_i, dz_i),
                      d_xd * spool_map_deriv(u_d, dz_d),
                      d_w))

    g_ui = np.zeros(n)
    g_ud = np.zeros(n)
    g_w = np.zeros(n)
    adj = 0.0  # dJ/dP_{k+1}, accumulated from later stages
    for k in range(n - 1, -1, -1):
        v_i, v_d, w = dv.u_I[k] * U_NORM, dv.u_D[k] * U_NORM, dv.omega[k]
        d_p, d_ui, d_ud, d_w = parts[k]
        # tracking term is in kPa^2, states in Pa: factor 1e-6 on d(e^2)/dP
        adj += 2.0 * q_e * (states[k] - spec.p_ref[k]) * 1e-6
        g_ui[k] = adj * d_ui + 2.0 * r_i * w * v_i * U_NORM
        g_ud[k] = adj * d_ud + 2.0 * r_i * (1.0 - w) * v_d * U_NORM
        g_w[k] = adj * d_w + r_i * (v_i * v_i - v_d * v_d) + lam * (1.0 - 2.0 * w)
        adj *= d_p
    return np.concatenate([g_ui, g_ud, g_w])


def make_objective(spec: HorizonSpec, params: PlantParams):
    """Objective/gradient callbacks over the flat decision array."""

    def fun(z_flat):
        _, j = rollout(spec, z_flat, params)
        return j

    def grad(z_flat):
        return gradient(spec, z_flat, params)

    return fun, grad
