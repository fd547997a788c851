import pytest

from pneuplots.schema import SchemaError, read_metrics, read_trace


def test_read_trace(trace_file):
    tr = read_trace(trace_file)
    assert tr.label == "ctrl_sine"
    assert len(tr) == 200
    assert tr.span == (0.0, pytest.approx(3.98))
    assert set(tr.columns) == {
        "t", "p_out_kPa_rel", "p_ref_kPa_rel", "e_kPa", "mode",
        "u_applied", "u_I", "u_D", "omega_rel", "solve_ms"}


def test_read_trace_custom_label(trace_file):
    assert read_trace(trace_file, "minmpc").label == "minmpc"


def test_read_trace_names_offending_column(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("t,p_out_kPa_rel,p_ref_kPa_rel,e_kPa,mode,"
                 "u_applied,u_I,u_D,omega,solve_ms\n" + "0," * 9 + "0\n")
    with pytest.raises(SchemaError, match="omega_rel"):
        read_trace(p)


def test_read_trace_rejects_empty(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("")
    with pytest.raises(SchemaError):
        read_trace(p)


def test_read_metrics(tmp_path):
    p = tmp_path / "summary.csv"
    p.write_text(
        "label,scenario,aae_kPa,max_abs_e_kPa,switches,pwm_energy_pct_s,act_ms\n"
        "a,step,1.0,40.0,10,600.0,50.0\n"
        "a,sine,3.0,6.0,10,300.0,40.0\n")
    table = read_metrics(p)
    assert table[("a", "step")]["aae_kPa"] == 1.0
    assert table[("a", "sine")]["pwm_energy_pct_s"] == 300.0


def test_read_metrics_rejects_bad_header(tmp_path):
    p = tmp_path / "summary.csv"
    p.write_text("label,scenario,aae,max_abs_e_kPa,switches,"
                 "pwm_energy_pct_s,act_ms\na,step,1,2,3,4,5\n")
    with pytest.raises(SchemaError):
        read_metrics(p)
