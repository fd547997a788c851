"""Rank-based radar chart comparing controllers across the five metrics.

Every metric is lower-is-better.  For each metric the controllers are
ranked per scenario (ties share the average rank), the ranks are averaged
over the scenarios, and the radar radius is (n_controllers + 1 - avg rank),
so rank 1 sits on the outer ring.  Values are deliberately NOT plotted:
ranks keep wildly different metric scales comparable on one chart.
"""

from __future__ import annotations

import math

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .schema import METRIC_COLUMNS, SchemaError

AXIS_LABELS = {
    "aae_kPa": "AAE",
    "max_abs_e_kPa": "Max|e|",
    "switches": "Switches",
    "pwm_energy_pct_s": "PWM-E",
    "act_ms": "ACT",
}


def _average_ranks(values):
    """Ranks 1..n for lower-is-better values; ties get the average rank."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def rank_table(metrics):
    """{(label, scenario): {metric: value}} -> {label: radii array}.

    Radii follow the metric order of METRIC_COLUMNS; every controller must
    carry every metric for every scenario present in the table.
    """
    labels = sorted({label for label, _ in metrics})
    scenarios = sorted({scen for _, scen in metrics})
    if len(labels) < 2:
        raise SchemaError("radar chart needs at least two controllers")
    for label in labels:
        for scen in scenarios:
            if (label, scen) not in metrics:
                raise SchemaError(
                    f"controller {label!r} is missing scenario {scen!r}")
            for m in METRIC_COLUMNS:
                v = metrics[(label, scen)].get(m)
                if v is None or not math.isfinite(v):
                    raise SchemaError(
                        f"controller {label!r} is missing metric {m!r} "
                        f"for scenario {scen!r}")

    n = len(labels)
    avg_rank = {label: np.zeros(len(METRIC_COLUMNS)) for label in labels}
    for j, metric in enumerate(METRIC_COLUMNS):
        for scen in scenarios:
            ranks = _average_ranks([metrics[(lab, scen)][metric]
                                    for lab in labels])
            for lab, r in zip(labels, ranks):
                avg_rank[lab][j] += r / len(scenarios)
    return {lab: (n + 1.0) - avg_rank[lab] for lab in labels}


def polygon_area(radii):
    """Area of the radar polygon for radii on evenly spaced axes."""
    radii = np.asarray(radii, dtype=float)
    k = len(radii)
    step = 2.0 * math.pi / k
    return 0.5 * math.sin(step) * float(
        np.sum(radii * np.roll(radii, -1)))


def render_radar(metrics, out):
    """Draw the rank radar from a metrics table and save it to `out`.

    Returns {label: radii} so callers can inspect the geometry.
    """
    radii = rank_table(metrics)
    labels = sorted(radii)
    n_axes = len(METRIC_COLUMNS)
    n_ctrl = len(labels)
    angles = np.linspace(0.0, 2.0 * math.pi, n_axes, endpoint=False)

    fig, ax = plt.subplots(subplot_kw={"projection": "polar"},
                           figsize=(6.0, 6.0))
    ax.set_theta_offset(math.pi / 2.0)
    ax.set_theta_direction(-1)
    for label, color in zip(labels, plt.rcParams["axes.prop_cycle"].by_key()["color"]):
        r = radii[label]
        closed_r = np.append(r, r[0])
        closed_a = np.append(angles, angles[0])
        ax.plot(closed_a, closed_r, color=color, lw=1.5, label=label)
        ax.fill(closed_a, closed_r, color=color, alpha=0.12)
    ax.set_xticks(angles)
    ax.set_xticklabels([AXIS_LABELS[m] for m in METRIC_COLUMNS])
    ax.set_yticks(np.arange(1, n_ctrl + 1))
    ax.set_yticklabels([f"rank {n_ctrl + 1 - k}" for k in range(1, n_ctrl + 1)],
                       fontsize=7)
    ax.set_ylim(0, n_ctrl + 0.3)
    ax.set_title("controller ranks (outer ring = best)", fontsize=10)
    ax.legend(loc="upper right", bbox_to_anchor=(1.25, 1.1), fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return radii
