"""Receiver-pressure dynamics of the positive-negative pressure circuit.

The state is the receiver absolute pressure.  Its rate splits into a drift
term (passive leaks toward atmosphere through the capped exhaust) and a
mode-dependent control gain multiplying the spool opening, which is the
form both the simulator and the controller model build on:

    dp/dt = f(p) + g_mode(p) * x_bar(u)

The ground-truth simulator integrates this with forward Euler on the exact
(kinked) flow law; controllers use the smoothed variant picked per call.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .gas_flow import (
    Conductances,
    FlowConstants,
    branch_flow,
    shape_factor_smoothed,
    shape_factor_smoothed_deriv,
)

__all__ = [
    "PlantParams",
    "PlantState",
    "spool_map",
    "spool_map_deriv",
    "drift_f",
    "control_gain_g",
    "rate_scale",
    "step_euler",
    "simulate_hold",
    "plant_params_from_dict",
]


@dataclass(frozen=True)
class PlantParams:
    """Physical constants of the plant.

    Pressures are absolute Pa; dz_I / dz_D are the valve dead-zone duty
    percentages for the inflation and deflation channels.
    """

    p_sup: float = 300e3
    p_sink: float = 10e3
    p_atm: float = 100e3
    gamma: float = 1.4
    R: float = 287.0
    V: float = 2.0e-5
    flow: FlowConstants = field(default_factory=FlowConstants)
    cond: Conductances = field(default_factory=Conductances)
    dz_I: float = 20.0
    dz_D: float = 25.0

    def __post_init__(self):
        if not self.p_sink < self.p_atm < self.p_sup:
            raise ValueError(
                f"need p_sink < p_atm < p_sup, got {self.p_sink}, "
                f"{self.p_atm}, {self.p_sup}")
        if self.gamma <= 1.0:
            raise ValueError(f"heat-capacity ratio must exceed 1, got {self.gamma}")
        if self.R <= 0.0 or self.V <= 0.0:
            raise ValueError("gas constant and receiver volume must be positive")
        for name in ("dz_I", "dz_D"):
            if not 0.0 <= getattr(self, name) < 100.0:
                raise ValueError(f"dead zone {name} must be in [0, 100)")


@dataclass(frozen=True)
class PlantState:
    p_out: float  # receiver absolute pressure, Pa
    t: float = 0.0  # simulation clock, s


def rate_scale(params: PlantParams) -> float:
    """gamma*R*T/V: converts mass flow (kg/s) into pressure rate (Pa/s)."""
    return params.gamma * params.R * params.flow.T / params.V


def spool_map(u, dz):
    """Mean spool opening in [0,1] for PWM duty u (%) with dead zone dz (%).

    Affine above the dead zone, pinned to 1 at full duty.
    """
    if u <= dz:
        return 0.0
    x = (u - dz) / (100.0 - dz)
    return x if x < 1.0 else 1.0


def spool_map_deriv(u, dz):
    """d x_bar / d u; zero strictly inside the dead zone.

    At the kinks the derivative pointing into the live range is returned
    (right derivative at u = dz, left at u = 100): the duty boxes put their
    bounds exactly on those kinks, and the one-sided values are what a
    solver needs there to see feasible descent.
    """
    if u < dz:
        return 0.0
    return 1.0 / (100.0 - dz)


def _a_flows(p, params, smoothed=False):
    """The four branch flows (a_so, a_os, a_oa, a_ao) at receiver pressure p."""
    k, c = params.flow, params.cond
    a_so = branch_flow(params.p_sup, p, c.c_so, k, smoothed)
    a_os = branch_flow(p, params.p_sink, c.c_os, k, smoothed)
    a_oa = branch_flow(p, params.p_atm, c.c_oa, k, smoothed)
    a_ao = branch_flow(params.p_atm, p, c.c_ao, k, smoothed)
    return a_so, a_os, a_oa, a_ao


def _a_flows_deriv(p, params, eps=1e-3):
    """d/dp of the four branch flows, smoothed flow law.

    Branches where p is upstream carry p both in the prefactor and in the
    ratio denominator, giving d/dp [p*phi(q/p)] = phi(r) - r*phi'(r).
    """
    k, c = params.flow, params.cond
    b, root = k.b, k.rho_ref * k.temp_root
    d_so = c.c_so * root * shape_factor_smoothed_deriv(p / params.p_sup, b, eps)
    r_os = params.p_sink / p
    d_os = c.c_os * root * (shape_factor_smoothed(r_os, b, eps)
                            - r_os * shape_factor_smoothed_deriv(r_os, b, eps))
    r_oa = params.p_atm / p
    d_oa = c.c_oa * root * (shape_factor_smoothed(r_oa, b, eps)
                            - r_oa * shape_factor_smoothed_deriv(r_oa, b, eps))
    d_ao = c.c_ao * root * shape_factor_smoothed_deriv(p / params.p_atm, b, eps)
    return d_so, d_os, d_oa, d_ao


def drift_f(p, params, smoothed=False):
    """Passive pressure rate (Pa/s): atmosphere leak-in minus leak-out.

    Zero at p = p_atm, positive below, negative above.
    """
    _, _, a_oa, a_ao = _a_flows(p, params, smoothed)
    return rate_scale(params) * (a_ao - a_oa)


def control_gain_g(p, mode, params, smoothed=False):
    """Pressure rate per unit spool opening (Pa/s) for the given mode.

    Opening the valve replaces the leak path by the supply path (mode 1)
    or the sink path (mode 0), hence the leak terms enter with opposite
    sign to the drift.
    """
    a_so, a_os, a_oa, a_ao = _a_flows(p, params, smoothed)
    if mode == 1:
        return rate_scale(params) * (a_so - a_ao + a_oa)
    return rate_scale(params) * (-a_os - a_ao + a_oa)


def drift_f_deriv(p, params, eps=1e-3):
    """d drift_f / dp, smoothed model."""
    _, _, d_oa, d_ao = _a_flows_deriv(p, params, eps)
    return rate_scale(params) * (d_ao - d_oa)


def control_gain_g_deriv(p, mode, params, eps=1e-3):
    """d control_gain_g / dp, smoothed model."""
    d_so, d_os, d_oa, d_ao = _a_flows_deriv(p, params, eps)
    if mode == 1:
        return rate_scale(params) * (d_so - d_ao + d_oa)
    return rate_scale(params) * (-d_os - d_ao + d_oa)


def step_euler(state: PlantState, mode, u, dt_sim, params: PlantParams) -> PlantState:
    """One forward-Euler step of the ground-truth plant (exact flow law).

    The pressure is clamped to [p_sink, p_sup]; physically the receiver
    cannot leave the band the sources define, and the clamp keeps the flow
    ratios in-domain no matter what inputs a fuzzer throws at it.
    """
    if dt_sim <= 0.0:
        raise ValueError(f"dt_sim must be positive, got {dt_sim}")
    dz = params.dz_I if mode == 1 else params.dz_D
    rate = drift_f(state.p_out, params) + \
        control_gain_g(state.p_out, mode, params) * spool_map(u, dz)
    p_new = state.p_out + dt_sim * rate
    if p_new < params.p_sink:
        p_new = params.p_sink
    elif p_new > params.p_sup:
        p_new = params.p_sup
    return PlantState(p_new, state.t + dt_sim)


def simulate_hold(state: PlantState, mode, u, t_hold, dt_sim,
                  params: PlantParams) -> PlantState:
    """Apply (mode, u) zero-order-held over t_hold, sub-stepping at dt_sim."""
    n = round(t_hold / dt_sim)
    if n < 1 or abs(n * dt_sim - t_hold) > 1e-9:
        raise ValueError(
            f"hold time {t_hold} is not an integer multiple of dt_sim {dt_sim}")
    for _ in range(n):
        state = step_euler(state, mode, u, dt_sim, params)
    return state


_PRESSURE_KEYS = ("p_sup", "p_sink", "p_atm")


def plant_params_from_dict(d: dict) -> PlantParams:
    """Build PlantParams from a config mapping.

    Keys are named exactly like the dataclass fields; the three system
    pressures are given in kPa in the file and converted to Pa here.
    Unknown keys are rejected so typos fail loudly.
    """
    defaults = PlantParams()
    kwargs = {}
    for key, val in d.items():
        if key == "flow":
            kwargs["flow"] = FlowConstants(**val)
        elif key == "cond":
            kwargs["cond"] = Conductances(**val)
        elif key in _PRESSURE_KEYS:
            kwargs[key] = float(val) * 1e3
        elif hasattr(defaults, key):
            kwargs[key] = float(val)
        else:
            raise ValueError(f"unknown plant parameter {key!r}")
    return replace(defaults, **kwargs)
