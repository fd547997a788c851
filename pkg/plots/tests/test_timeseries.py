import pytest

from pneuplots.schema import read_trace
from pneuplots.timeseries import PANELS, FigureSpec, render_timeseries


def test_four_panel_figure(tmp_path, trace_file):
    out = tmp_path / "fig.png"
    fig = render_timeseries(FigureSpec([read_trace(trace_file)], str(out)))
    assert out.exists() and out.stat().st_size > 0
    assert len(fig.axes) == 4
    # pressure panel carries the reference plus one controller line,
    # each with every sample
    pressure = fig.axes[0]
    assert len(pressure.lines) == 2
    assert all(len(line.get_xdata()) == 200 for line in pressure.lines)


def test_two_controllers_share_legend(tmp_path, trace_writer):
    a = trace_writer(tmp_path / "a_sine.csv", phase=0.0)
    b = trace_writer(tmp_path / "b_sine.csv", phase=1.0, seed=1)
    out = tmp_path / "fig.png"
    fig = render_timeseries(FigureSpec(
        [read_trace(a, "alpha"), read_trace(b, "beta")], str(out)))
    labels = [t.get_text() for t in fig.axes[0].get_legend().get_texts()]
    assert "alpha" in labels and "beta" in labels


def test_zoom_inset_limited_to_window(tmp_path, trace_file):
    out = tmp_path / "fig.png"
    fig = render_timeseries(FigureSpec([read_trace(trace_file)], str(out),
                                       zoom=(1.0, 1.6)))
    # the inset lives as a child axes of the pressure panel
    children = fig.axes[0].child_axes
    assert len(children) == 1
    assert children[0].get_xlim() == (1.0, 1.6)


def test_panel_subset(tmp_path, trace_file):
    out = tmp_path / "fig.png"
    fig = render_timeseries(FigureSpec([read_trace(trace_file)], str(out),
                                       panels=("pressure", "mode")))
    assert len(fig.axes) == 2


def test_rejects_unknown_panel(trace_file):
    with pytest.raises(ValueError, match="unknown panel"):
        FigureSpec([read_trace(trace_file)], "x.png", panels=("pressure", "u"))


def test_rejects_zoom_outside_span(trace_file):
    with pytest.raises(ValueError, match="zoom"):
        FigureSpec([read_trace(trace_file)], "x.png", zoom=(3.0, 99.0))


def test_rejects_empty_inputs():
    with pytest.raises(ValueError):
        FigureSpec([], "x.png")


def test_deterministic_output(tmp_path, trace_file):
    spec_a = FigureSpec([read_trace(trace_file)], str(tmp_path / "a.png"))
    spec_b = FigureSpec([read_trace(trace_file)], str(tmp_path / "b.png"))
    render_timeseries(spec_a)
    render_timeseries(spec_b)
    assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()
