"""Command-line front end: run benchmarks, compute metrics, compare traces."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import (
    CONTROLLER_NAMES,
    ConfigError,
    Metrics,
    RunTrace,
    compute_metrics,
    load_config,
    make_controller,
    make_scenario,
    run_closed_loop,
)

METRIC_HEADER = ("label", "scenario", "aae_kPa", "max_abs_e_kPa", "switches",
                 "pwm_energy_pct_s", "act_ms")


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser():
    p = argparse.ArgumentParser(
        prog="pneumpc",
        description="Pneumatic pressure-tracking benchmark: switched plant "
                    "simulator with MPC and PID controllers.")
    sub = p.add_subparsers(required=True)

    run = sub.add_parser("run", help="run one closed-loop experiment")
    run.add_argument("--controller", required=True, choices=CONTROLLER_NAMES)
    run.add_argument("--scenario", required=True, choices=("step", "sine"))
    run.add_argument("--config", default=None, help="YAML overriding defaults")
    run.add_argument("--out", required=True, help="trace CSV to write")
    run.add_argument("--no-timing", action="store_true",
                     help="zero the solve_ms column for bit-identical output")
    run.set_defaults(func=_cmd_run)

    met = sub.add_parser("metrics", help="summarize one trace CSV")
    met.add_argument("--in", dest="trace", required=True)
    met.add_argument("--out", default=None, help="also write a one-row CSV")
    met.set_defaults(func=_cmd_metrics)

    cmp_ = sub.add_parser("compare", help="tabulate every trace in a directory")
    cmp_.add_argument("--dir", required=True,
                      help="directory of <controller>_<scenario>.csv traces")
    cmp_.add_argument("--out", default=None, help="also write the table as CSV")
    cmp_.set_defaults(func=_cmd_compare)
    return p


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    scenario = make_scenario(args.scenario)
    controller = make_controller(args.controller, cfg)
    trace = run_closed_loop(scenario, controller, cfg.plant,
                            dt_sim=cfg.dt_sim,
                            measure_time=not args.no_timing)
    trace.write_csv(args.out)
    m = compute_metrics(trace)
    print(f"{args.controller} on {args.scenario}: {len(trace)} steps, "
          f"AAE {m.aae:.3f} kPa, max|e| {m.max_abs_e:.2f} kPa, "
          f"{m.switches} switches, PWM-E {m.pwm_energy:.1f} %*s, "
          f"ACT {m.act_ms:.3f} ms -> {args.out}")
    return 0


def _cmd_metrics(args) -> int:
    trace = RunTrace.read_csv(args.trace)
    m = compute_metrics(trace)
    label, scenario = _label_from_path(args.trace)
    _print_table([(label, scenario, m)])
    if args.out:
        _write_metrics_csv(args.out, [(label, scenario, m)])
    return 0


def _cmd_compare(args) -> int:
    paths = sorted(Path(args.dir).glob("*.csv"))
    if not paths:
        raise ConfigError(f"no trace CSVs found in {args.dir}")
    rows = []
    for path in paths:
        label, scenario = _label_from_path(path)
        rows.append((label, scenario, compute_metrics(RunTrace.read_csv(path))))
    rows.sort(key=lambda r: (r[1], r[0]))
    _print_table(rows)
    if args.out:
        _write_metrics_csv(args.out, rows)
    return 0


def _label_from_path(path):
    """controller and scenario from a '<controller>_<scenario>.csv' name."""
    stem = Path(path).stem
    if "_" in stem:
        label, _, scenario = stem.rpartition("_")
        return label, scenario
    return stem, "unknown"


def _print_table(rows):
    header = f"{'controller':<16} {'scenario':<9} {'AAE':>7} {'Max|e|':>8} " \
             f"{'Switches':>9} {'PWM-E':>8} {'ACT(ms)':>10}"
    current = None
    for label, scenario, m in rows:
        if scenario != current:
            print(f"\n[{scenario}]")
            print(header)
            current = scenario
        print(f"{label:<16} {scenario:<9} {m.aae:>7.2f} {m.max_abs_e:>8.2f} "
              f"{m.switches:>9d} {m.pwm_energy:>8.1f} {m.act_ms:>10.4f}")


def _write_metrics_csv(path, rows):
    lines = [",".join(METRIC_HEADER)]
    for label, scenario, m in rows:
        lines.append(f"{label},{scenario},{m.aae:.9g},{m.max_abs_e:.9g},"
                     f"{m.switches},{m.pwm_energy:.9g},{m.act_ms:.9g}")
    Path(path).write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    sys.exit(main())
