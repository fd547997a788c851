"""Compressible-flow primitives for the two-valve pneumatic circuit.

All pressures here are absolute Pa.  Mass flow through an orifice follows
the sonic-conductance ellipse law: choked below the critical pressure
ratio, elliptic in the subsonic band, and clamped to zero under reverse
pressure (ratio >= 1).  The zero-clamp is what lets the four operating
cases of the receiver collapse into a single control-affine expression,
so it is deliberate rather than defensive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "FlowConstants",
    "Conductances",
    "shape_factor",
    "shape_factor_smoothed",
    "shape_factor_smoothed_deriv",
    "branch_flow",
    "q_out_cases",
]


@dataclass(frozen=True)
class FlowConstants:
    """Gas-side constants of the orifice flow law.

    b        critical pressure ratio (choked below it), dimensionless
    rho_ref  gas density at reference conditions, kg/m^3
    T_ref    reference temperature, K
    T        working gas temperature, K
    """

    b: float = 0.26
    rho_ref: float = 1.185
    T_ref: float = 293.15
    T: float = 293.15

    def __post_init__(self):
        if not 0.0 < self.b < 1.0:
            raise ValueError(f"critical ratio b must be in (0,1), got {self.b}")
        if self.rho_ref <= 0.0 or self.T_ref <= 0.0 or self.T <= 0.0:
            raise ValueError("rho_ref, T_ref and T must all be positive")

    @property
    def temp_root(self) -> float:
        """sqrt(T_ref / T), the temperature correction of the flow law."""
        return math.sqrt(self.T_ref / self.T)


@dataclass(frozen=True)
class Conductances:
    """Sonic conductances of the four flow paths, m^3 s^-1 Pa^-1.

    Naming is <from><to> with s=supply, o=outlet/receiver, a=atmosphere
    and the sink being the vacuum side: c_so supply->outlet, c_os
    outlet->sink, c_oa outlet->atmosphere (leak), c_ao atmosphere->outlet
    (leak).
    """

    c_so: float = 2.64e-10
    c_os: float = 3.44e-10
    c_oa: float = 6.94e-12
    c_ao: float = 4.52e-12

    def __post_init__(self):
        for name in ("c_so", "c_os", "c_oa", "c_ao"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"conductance {name} must be positive")


def shape_factor(r: float, b: float) -> float:
    """Ellipse-law shape factor phi(r) for pressure ratio r = p_down/p_up.

    1 for r <= b (choked), sqrt(1 - ((r-b)/(1-b))^2) for b < r < 1,
    0 for r >= 1 (no forward flow).  Continuous in r.
    """
    if r <= b:
        return 1.0
    if r >= 1.0:
        return 0.0
    s = (r - b) / (1.0 - b)
    return math.sqrt(1.0 - s * s)


# Width of the soft-clamp region in normalized-ratio units.  It must be
# narrow enough that the smoothed factor stays within eps of the exact one
# (the ellipse has unbounded slope at ratio 1, so the budget shrinks
# quadratically with eps).
def _soft_clamp_width(eps: float) -> float:
    return eps * eps


def shape_factor_smoothed(r: float, b: float, eps: float = 1e-3) -> float:
    """C1 surrogate of shape_factor for gradient-based optimization.

    The normalized ratio s = (r-b)/(1-b) is pushed through a soft clamp
    just below its upper limit before entering the ellipse: on the last
    eps^2 of the band the clamped ratio approaches 1 with quartic tangency,
    so the ellipse's infinite slope at r = 1 becomes a steep but finite
    ramp landing on zero with zero derivative.  At and above r = 1 the
    factor is exactly zero, outside the clamp region it equals
    shape_factor exactly, and the two never differ by more than eps.
    """
    if eps <= 0.0:
        raise ValueError("blend half-width eps must be positive")
    s = (r - b) / (1.0 - b)
    if s <= 0.0:
        return 1.0
    if s >= 1.0:
        return 0.0
    d = _soft_clamp_width(eps)
    if s <= 1.0 - d:
        return math.sqrt(1.0 - s * s)
    # s_c = 1 - g(v), v the distance to ratio 1.  g matches value and slope
    # of the identity at the band edge and vanishes like v^4 at v = 0,
    # which keeps sqrt(1 - s_c^2) differentiable at touchdown.
    v = 1.0 - s
    g = v ** 4 * (4.0 * d - 3.0 * v) / d ** 4
    sc = 1.0 - g
    return math.sqrt(max(1.0 - sc * sc, 0.0))


def shape_factor_smoothed_deriv(r: float, b: float, eps: float = 1e-3) -> float:
    """d/dr of shape_factor_smoothed, analytic."""
    s = (r - b) / (1.0 - b)
    if s <= 0.0 or s >= 1.0:
        return 0.0
    d = _soft_clamp_width(eps)
    if s <= 1.0 - d:
        return -s / math.sqrt(1.0 - s * s) / (1.0 - b)
    v = 1.0 - s
    g = v ** 4 * (4.0 * d - 3.0 * v) / d ** 4
    gp = v ** 3 * (16.0 * d - 15.0 * v) / d ** 4  # dg/dv
    sc = 1.0 - g
    phi = math.sqrt(max(1.0 - sc * sc, 0.0))
    if phi == 0.0:
        return 0.0
    # ds_c/ds = +gp since v runs opposite to s
    return -sc * gp / phi / (1.0 - b)


def branch_flow(p_up, p_down, c, k: FlowConstants = FlowConstants(),
                smoothed: bool = False, eps: float = 1e-3):
    """Mass flow (kg/s) pushed from p_up toward p_down through conductance c.

    A(p) = p_up * c * rho_ref * sqrt(T_ref/T) * phi(p_down/p_up), i.e. the
    orifice law without the spool-opening factor.  Zero whenever
    p_down >= p_up; nonincreasing in p_down at fixed p_up.
    """
    if p_up <= 0.0:
        raise ValueError(f"upstream pressure must be positive, got {p_up}")
    if p_down < 0.0:
        raise ValueError(f"downstream pressure must be nonnegative, got {p_down}")
    r = p_down / p_up
    phi = shape_factor_smoothed(r, k.b, eps) if smoothed else shape_factor(r, k.b)
    return p_up * c * k.rho_ref * k.temp_root * phi


def q_out_cases(p_out, x_bar, mode, params):
    """Net mass flow into the receiver (kg/s), computed case by case.

    This is the explicit four-case bookkeeping (inflation/deflation crossed
    with receiver above/below atmosphere) kept as an independent cross-check
    of the control-affine drift/gain decomposition.  The leak always runs on
    the complementary spool path with opening (1 - x_bar).

    ``params`` needs attributes p_sup, p_sink, p_atm, flow, cond (a
    PlantParams works).
    """
    if not params.p_sink < p_out < params.p_sup:
        raise ValueError(
            f"receiver pressure {p_out} outside ({params.p_sink}, {params.p_sup})")
    if not 0.0 <= x_bar <= 1.0:
        raise ValueError(f"spool ratio must be in [0,1], got {x_bar}")
    if mode not in (0, 1):
        raise ValueError(f"mode must be 0 or 1, got {mode}")
    k, c = params.flow, params.cond
    if mode == 1:
        main = branch_flow(params.p_sup, p_out, c.c_so, k)
        if p_out >= params.p_atm:
            # inflation above atmosphere: leak vents to ambient
            leak = branch_flow(p_out, params.p_atm, c.c_oa, k)
            return x_bar * main - (1.0 - x_bar) * leak
        # inflation below atmosphere: ambient leaks in
        leak = branch_flow(params.p_atm, p_out, c.c_ao, k)
        return x_bar * main + (1.0 - x_bar) * leak
    main = branch_flow(p_out, params.p_sink, c.c_os, k)
    if p_out >= params.p_atm:
        leak = branch_flow(p_out, params.p_atm, c.c_oa, k)
        return -x_bar * main - (1.0 - x_bar) * leak
    leak = branch_flow(params.p_atm, p_out, c.c_ao, k)
    return -x_bar * main + (1.0 - x_bar) * leak
