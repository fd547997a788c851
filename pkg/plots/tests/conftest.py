import csv

import numpy as np
import pytest

TRACE_COLUMNS = ("t", "p_out_kPa_rel", "p_ref_kPa_rel", "e_kPa", "mode",
                 "u_applied", "u_I", "u_D", "omega_rel", "solve_ms")


def write_trace(path, n=200, phase=0.0, seed=0):
    """Synthetic but schema-exact trace: noisy tracking of a slow sine."""
    rng = np.random.default_rng(seed)
    t = np.arange(n) * 0.02
    ref = 40.0 * np.sin(0.5 * np.pi * t)
    p = ref - 2.0 * np.sin(0.5 * np.pi * t + phase) + rng.normal(0, 0.1, n)
    e = ref - p
    mode = (e >= 0).astype(int)
    u = 20.0 + 60.0 * np.abs(np.sin(0.5 * np.pi * t))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for k in range(n):
            w.writerow([f"{t[k]:.9g}", f"{p[k]:.9g}", f"{ref[k]:.9g}",
                        f"{e[k]:.9g}", mode[k], f"{u[k]:.9g}",
                        f"{u[k]:.9g}", "25", f"{float(mode[k]):.9g}", "0.5"])
    return path


def make_metrics(values):
    """{(label, scenario): (aae, max, sw, pwm, act)} -> metrics table dict."""
    names = ("aae_kPa", "max_abs_e_kPa", "switches", "pwm_energy_pct_s",
             "act_ms")
    return {key: dict(zip(names, vals)) for key, vals in values.items()}


@pytest.fixture()
def trace_file(tmp_path):
    return write_trace(tmp_path / "ctrl_sine.csv")


@pytest.fixture()
def trace_writer():
    return write_trace


@pytest.fixture()
def metrics_builder():
    return make_metrics
