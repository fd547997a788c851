#!/usr/bin/env python3
"""Compressible flow law: shape factor, branch flows, case unification.

Walks through the building blocks of the valve flow model: the choked /
subsonic / blocked shape factor, the smoothed variant the optimizer uses,
the four directed branch flows, and the check that the explicit four-case
receiver flow equals the drift + mode-gain decomposition everywhere.
"""

import numpy as np

from pneumpc import PlantParams, branch_flow, q_out_cases, shape_factor
from pneumpc.gas_flow import shape_factor_smoothed
from pneumpc.plant import control_gain_g, drift_f, rate_scale

params = PlantParams()
b = params.flow.b

print("=" * 72)
print("1. Shape factor phi(r): choked below b=%.2f, elliptic, blocked at 1" % b)
print("=" * 72)
print(f"\n  {'ratio':>8} {'phi':>10} {'phi smoothed':>14} {'|diff|':>10}")
for r in (0.0, 0.10, 0.26, 0.40, 0.63, 0.80, 0.95, 0.999, 0.9999995, 1.0, 1.1):
    exact = shape_factor(r, b)
    smooth = shape_factor_smoothed(r, b)
    print(f"  {r:>8.7g} {exact:>10.6f} {smooth:>14.6f} {abs(exact - smooth):>10.2e}")
print("""
  The smoothed factor only deviates inside a sliver next to ratio 1 where
  the ellipse has a vertical tangent; the deviation never exceeds the
  1e-3 blend width, and both variants are exactly zero from ratio 1 on.
""")

print("=" * 72)
print("2. Branch flows at receiver pressure 150 kPa (absolute)")
print("=" * 72)
p = 150e3
k, c = params.flow, params.cond
rows = [
    ("supply  -> outlet", params.p_sup, p, c.c_so),
    ("outlet  -> sink ", p, params.p_sink, c.c_os),
    ("outlet  -> atmos", p, params.p_atm, c.c_oa),
    ("atmos   -> outlet", params.p_atm, p, c.c_ao),
]
print(f"\n  {'path':<20} {'ratio':>8} {'flow kg/s':>12} {'as Pa/s':>12}")
for name, up, dn, cond in rows:
    q = branch_flow(up, dn, cond, k)
    print(f"  {name:<20} {dn / up:>8.3f} {q:>12.4e} {q * rate_scale(params):>12.1f}")
print("""
  With the receiver above atmosphere, the atmosphere->outlet path is
  blocked (ratio > 1) and the leak vents outward.  Multiplying by
  gamma*R*T/V converts each mass flow into a pressure rate.
""")

print("=" * 72)
print("3. Four-case outlet flow equals drift + gain * opening")
print("=" * 72)
rng = np.random.default_rng(7)
worst = 0.0
for _ in range(20000):
    po = rng.uniform(params.p_sink + 1.0, params.p_sup - 1.0)
    x = rng.uniform(0.0, 1.0)
    m = int(rng.integers(0, 2))
    q_cases = q_out_cases(po, x, m, params)
    q_affine = (drift_f(po, params) + control_gain_g(po, m, params) * x) \
        / rate_scale(params)
    worst = max(worst, abs(q_cases - q_affine)
                / max(abs(q_cases), abs(q_affine), 1e-30))
print(f"\n  worst relative mismatch over 2e4 random (p, x, mode): {worst:.3e}")
print("""
  The case split never has to be enumerated at run time: because the shape
  factor clamps to zero under reverse pressure, the single control-affine
  expression reproduces all four operating cases identically.
""")
