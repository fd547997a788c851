"""Four-panel time-series comparison figure.

Stacked panels, top to bottom: output pressure with the reference overlaid,
tracking error, applied PWM duty, and the binary mode sequence drawn as a
0/1 staircase.  One colored line per controller, optional zoomed inset on
the pressure panel.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .schema import Trace

PANELS = ("pressure", "error", "pwm", "mode")

_PANEL_LABELS = {
    "pressure": "pressure [kPa]",
    "error": "error [kPa]",
    "pwm": "duty [%]",
    "mode": "mode",
}

COLORS = ("tab:blue", "tab:orange", "tab:green", "tab:red", "tab:purple")


@dataclass
class FigureSpec:
    traces: list          # Trace objects, plotted in order
    out: str
    panels: tuple = PANELS
    zoom: tuple | None = None  # (t_start, t_end) inset on the pressure panel

    def __post_init__(self):
        if not self.traces:
            raise ValueError("at least one input trace is required")
        bad = [p for p in self.panels if p not in PANELS]
        if bad:
            raise ValueError(f"unknown panel {bad[0]!r} (choose from {PANELS})")
        if self.zoom is not None:
            t0, t1 = self.zoom
            lo, hi = self.traces[0].span
            if not (lo <= t0 < t1 <= hi):
                raise ValueError(
                    f"zoom window {self.zoom} outside trace span ({lo}, {hi})")


def _panel_series(trace: Trace, panel):
    if panel == "pressure":
        return trace["p_out_kPa_rel"]
    if panel == "error":
        return trace["e_kPa"]
    if panel == "pwm":
        return trace["u_applied"]
    return trace["mode"]


def render_timeseries(spec: FigureSpec):
    """Draw the figure and write it to spec.out; returns the Figure."""
    n = len(spec.panels)
    fig, axes = plt.subplots(n, 1, sharex=True, figsize=(8.0, 2.0 * n),
                             squeeze=False)
    axes = axes[:, 0]
    for ax, panel in zip(axes, spec.panels):
        if panel == "pressure":
            ref = spec.traces[0]
            ax.plot(ref["t"], ref["p_ref_kPa_rel"], "k--", lw=1.0,
                    label="reference")
        for trace, color in zip(spec.traces, COLORS):
            y = _panel_series(trace, panel)
            if panel == "mode":
                ax.step(trace["t"], y, where="post", color=color,
                        lw=1.0, label=trace.label)
            else:
                ax.plot(trace["t"], y, color=color, lw=1.0, label=trace.label)
        ax.set_ylabel(_PANEL_LABELS[panel])
        ax.grid(True, alpha=0.3)
        if panel == "mode":
            ax.set_yticks([0, 1])
            ax.set_yticklabels(["deflate", "inflate"])
    axes[-1].set_xlabel("time [s]")
    axes[0].legend(loc="upper right", fontsize=8, ncol=min(len(spec.traces) + 1, 3))

    if spec.zoom is not None and "pressure" in spec.panels:
        t0, t1 = spec.zoom
        host = axes[list(spec.panels).index("pressure")]
        inset = host.inset_axes([0.55, 0.08, 0.42, 0.5])
        ref = spec.traces[0]
        inset.plot(ref["t"], ref["p_ref_kPa_rel"], "k--", lw=0.8)
        for trace, color in zip(spec.traces, COLORS):
            inset.plot(trace["t"], trace["p_out_kPa_rel"], color=color, lw=0.9)
        inset.set_xlim(t0, t1)
        mask = (ref["t"] >= t0) & (ref["t"] <= t1)
        ys = [tr["p_out_kPa_rel"][mask] for tr in spec.traces]
        lo = min(y.min() for y in ys)
        hi = max(y.max() for y in ys)
        pad = 0.1 * max(hi - lo, 1.0)
        inset.set_ylim(lo - pad, hi + pad)
        inset.tick_params(labelsize=7)
        host.indicate_inset_zoom(inset, edgecolor="gray")

    fig.align_ylabels(axes)
    fig.tight_layout()
    fig.savefig(spec.out, dpi=150)
    plt.close(fig)
    return fig
