"""Figure acceptance against the committed benchmark outputs.

Consumes the real trace/summary CSVs produced by the simulation package
(results/ at the repository root) purely through their file formats.
"""

from pathlib import Path

import pytest

from pneuplots.radar import polygon_area, render_radar
from pneuplots.schema import read_metrics, read_trace
from pneuplots.timeseries import FigureSpec, render_timeseries

RESULTS = Path(__file__).resolve().parents[2] / "results"
CONTROLLERS = ("minmpc", "nmpc", "pid-gentle", "pid-aggressive")


@pytest.fixture(scope="module")
def step_traces():
    missing = [c for c in CONTROLLERS
               if not (RESULTS / f"{c}_step.csv").exists()]
    if missing:
        pytest.fail(f"benchmark traces not found in {RESULTS}: {missing}")
    return [read_trace(RESULTS / f"{c}_step.csv", c) for c in CONTROLLERS]


def test_four_panel_comparison_figure(tmp_path, step_traces):
    out = tmp_path / "step_comparison.png"
    fig = render_timeseries(FigureSpec(step_traces, str(out), zoom=(4.0, 4.6)))
    assert out.exists() and out.stat().st_size > 0
    # panel list: output pressure, tracking error, control input, mode
    labels = [ax.get_ylabel() for ax in fig.axes[:4]]
    assert labels == ["pressure [kPa]", "error [kPa]", "duty [%]", "mode"]
    # every controller appears on every panel with the full 1100 samples
    for ax in fig.axes[:4]:
        counts = [len(line.get_xdata()) for line in ax.lines]
        assert counts.count(1100) >= len(CONTROLLERS)


def test_radar_mode_scheduler_has_largest_area(tmp_path):
    summary = RESULTS / "summary.csv"
    assert summary.exists(), "run `pneumpc compare --dir results --out ...` first"
    out = tmp_path / "radar.png"
    radii = render_radar(read_metrics(summary), str(out))
    assert out.exists() and out.stat().st_size > 0
    assert set(radii) == set(CONTROLLERS)
    areas = {label: polygon_area(r) for label, r in radii.items()}
    best = max(areas, key=areas.get)
    print("\nradar areas:", {k: round(v, 2) for k, v in areas.items()})
    assert best == "minmpc", areas
