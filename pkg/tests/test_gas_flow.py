"""Flow-law primitives: shape factor, branch flows, four-case outlet flow."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from pneumpc.gas_flow import (
    Conductances,
    FlowConstants,
    branch_flow,
    q_out_cases,
    shape_factor,
    shape_factor_smoothed,
    shape_factor_smoothed_deriv,
)
from pneumpc.plant import control_gain_g, drift_f, rate_scale

B = 0.26


def test_shape_factor_choked_branch():
    assert shape_factor(0.20, B) == 1.0
    assert shape_factor(B, B) == 1.0


def test_shape_factor_blocked_branch():
    assert shape_factor(1.0, B) == 0.0
    assert shape_factor(1.7, B) == 0.0


def test_shape_factor_subsonic_value():
    # (0.63-0.26)/0.74 = 0.5, sqrt(1-0.25)
    assert_allclose(shape_factor(0.63, B), math.sqrt(0.75), rtol=1e-15)


@pytest.mark.parametrize("r0", [B, 1.0])
def test_shape_factor_continuity_at_joins(r0):
    h = 1e-13
    left = shape_factor(r0 - h, B)
    right = shape_factor(r0 + h, B)
    assert abs(left - right) <= 1e-6  # sqrt itself moves ~sqrt(h) near 1
    assert abs(shape_factor(r0, B) - right) <= abs(left - right) + 1e-12


def test_shape_factor_continuity_limit_values():
    assert_allclose(shape_factor(B + 1e-14, B), 1.0, atol=1e-12)
    assert_allclose(shape_factor(1.0 - 1e-14, B), 0.0, atol=1e-6)


def test_smoothed_equals_exact_outside_bands():
    eps = 1e-3
    for r in (0.0, 0.1, B - 2 * eps, B + 2 * eps, 0.5, 0.9, 1.0 - 2 * eps):
        assert shape_factor_smoothed(r, B, eps) == shape_factor(r, B)
    assert shape_factor_smoothed(1.0 + 2e-3, B, eps) == 0.0


def test_smoothed_value_at_critical_ratio():
    assert abs(shape_factor_smoothed(B, B, 1e-3) - 1.0) <= 1e-3


def test_smoothed_within_eps_everywhere():
    eps = 1e-3
    rs = np.linspace(0.0, 1.05, 400001)
    dev = max(abs(shape_factor_smoothed(r, B, eps) - shape_factor(r, B))
              for r in rs)
    # also probe the clamp region densely
    rs = np.linspace(1.0 - 3 * eps * eps, 1.0 + eps * eps, 200001)
    dev = max(dev, max(abs(shape_factor_smoothed(r, B, eps) - shape_factor(r, B))
                       for r in rs))
    assert dev <= eps


def test_smoothed_in_unit_interval(rng):
    for r in rng.uniform(0.0, 1.2, 20000):
        v = shape_factor_smoothed(r, B)
        assert 0.0 <= v <= 1.0


def test_smoothed_is_c1():
    # central finite differences track the analytic derivative, including
    # across both joins of the soft-clamp region
    eps = 1e-3
    d = eps * eps
    b_norm = 1.0 - B
    probes = [0.3, 0.7, 1.0 - b_norm * 2 * d, 1.0 - b_norm * d / 2,
              1.0 - b_norm * d / 10]
    for r in probes:
        h = 1e-9
        fd = (shape_factor_smoothed(r + h, B, eps)
              - shape_factor_smoothed(r - h, B, eps)) / (2 * h)
        an = shape_factor_smoothed_deriv(r, B, eps)
        assert_allclose(fd, an, rtol=1e-4, atol=1e-6)
    # derivative is continuous (no jump) at the clamp touchdown r = 1
    near_one = shape_factor_smoothed_deriv(1.0 - 1e-12, B, eps)
    assert abs(near_one) < 1e-3
    assert shape_factor_smoothed_deriv(1.0, B, eps) == 0.0


def test_branch_flow_zero_when_downstream_higher():
    assert branch_flow(300e3, 300e3, 2.64e-10) == 0.0
    assert branch_flow(100e3, 250e3, 2.64e-10) == 0.0


def test_branch_flow_values():
    # frozen from direct evaluation of the flow law with Table-standard gas
    # constants: ratio 1/3 -> phi = 0.995078, ratio 2/3 -> phi = 0.835463
    assert_allclose(branch_flow(300e3, 100e3, 2.64e-10), 9.339002e-5, rtol=1e-6)
    assert_allclose(branch_flow(300e3, 200e3, 2.64e-10), 7.840970e-5, rtol=1e-6)


def test_branch_flow_monotone_in_downstream(rng):
    k = FlowConstants()
    for _ in range(200):
        p_up = rng.uniform(50e3, 300e3)
        downs = np.sort(rng.uniform(0.0, p_up * 1.2, 20))
        flows = [branch_flow(p_up, pd, 3e-10, k) for pd in downs]
        assert all(a >= b - 1e-18 for a, b in zip(flows, flows[1:]))
        assert all(f >= 0.0 for f in flows)


def test_branch_flow_rejects_bad_upstream():
    with pytest.raises(ValueError):
        branch_flow(0.0, 1e5, 2.64e-10)
    with pytest.raises(ValueError):
        branch_flow(-10.0, 1e5, 2.64e-10)


def test_q_out_at_atmosphere_closed_spool_is_zero(params):
    assert q_out_cases(params.p_atm, 0.0, 0, params) == 0.0
    assert q_out_cases(params.p_atm, 0.0, 1, params) == 0.0


def test_q_out_full_spool_closes_leak(params):
    k = params.flow
    expected = branch_flow(params.p_sup, 150e3, params.cond.c_so, k)
    assert q_out_cases(150e3, 1.0, 1, params) == expected


def test_q_out_deflation_above_atmosphere(params):
    k = params.flow
    expected = (-0.5 * branch_flow(150e3, params.p_sink, params.cond.c_os, k)
                - 0.5 * branch_flow(150e3, params.p_atm, params.cond.c_oa, k))
    assert_allclose(q_out_cases(150e3, 0.5, 0, params), expected, rtol=1e-15)


def test_q_out_domain(params):
    with pytest.raises(ValueError):
        q_out_cases(params.p_sink, 0.5, 0, params)
    with pytest.raises(ValueError):
        q_out_cases(params.p_sup + 1.0, 0.5, 1, params)
    with pytest.raises(ValueError):
        q_out_cases(150e3, 1.2, 1, params)


def test_case_split_matches_control_affine_form(params, rng):
    # the drift/gain decomposition must reproduce the explicit case
    # bookkeeping for any pressure, spool ratio and mode
    scale = rate_scale(params)
    worst = 0.0
    for _ in range(10000):
        p = rng.uniform(params.p_sink + 1e-6, params.p_sup - 1e-6)
        x = rng.uniform(0.0, 1.0)
        m = int(rng.integers(0, 2))
        q = q_out_cases(p, x, m, params)
        affine = (drift_f(p, params) + control_gain_g(p, m, params) * x) / scale
        worst = max(worst, abs(q - affine) / max(abs(q), abs(affine), 1e-30))
    assert worst <= 1e-10


def test_flow_signs(params):
    assert q_out_cases(params.p_atm + 5e3, 1.0, 1, params) > 0.0
    assert q_out_cases(params.p_atm - 5e3, 1.0, 0, params) < 0.0


def test_constants_validation():
    with pytest.raises(ValueError):
        FlowConstants(b=1.2)
    with pytest.raises(ValueError):
        FlowConstants(T=-1.0)
    with pytest.raises(ValueError):
        Conductances(c_so=0.0)
