"""Command-line front end.

Subcommands:

* ``run --scenario <path> --out <dir>`` -- execute one scenario and emit the
  trajectory CSV, summary JSON, scenario echo, and (optionally) an SVG chart.
* ``sweep --scenario <path> --out <dir>`` -- execute the scenario's sweep,
  one subdirectory per value, plus a comparison CSV.
* ``presets list`` / ``presets show <name>`` -- inspect built-in scenarios.

``--preset <name>`` may replace ``--scenario`` in run and sweep. Exit codes:
0 success, 2 scenario validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .errors import LyapctrlError, ScenarioError
from .output import (
    RunReport,
    fidelity_svg,
    format_float,
    run_report,
    states_csv,
    trajectory_csv,
)
from .presets import preset, preset_names
from .propagate import propagate
from .scenario import Scenario, parse_scenario


def execute_run(scenario: Scenario, out_dir) -> RunReport:
    """Run one sweep-free scenario and write its artifacts into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model = scenario.build_model()
    scheme = scenario.build_scheme()
    cfg = scenario.build_integrator()
    psi0 = scenario.build_initial_state(model)
    opts = scenario.output

    start = time.perf_counter()
    traj = propagate(model, scheme, psi0, cfg)
    report = run_report(traj, wall_time_s=time.perf_counter() - start)

    (out / "trajectory.csv").write_text(trajectory_csv(traj, opts["columns"]))
    (out / "summary.json").write_text(report.to_json())
    (out / "scenario.json").write_text(scenario.echo())
    if opts["svg"]:
        fids = [row[1] for row in _fidelity_series(traj)]
        (out / "fidelity.svg").write_text(fidelity_svg(traj.times, fids))
    if opts["state_dump"]:
        (out / "states.csv").write_text(states_csv(traj))
    return report


def _fidelity_series(traj):
    from .diagnostics import fidelity

    return [(t, fidelity(fr, st))
            for t, fr, st in zip(traj.times, traj.frames, traj.states)]


def execute_sweep(scenario: Scenario, out_dir):
    """Run every sweep value independently and write the comparison table."""
    if scenario.sweep is None:
        raise ScenarioError("sweep", "scenario has no sweep spec")
    parameter, values = scenario.sweep
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for value in values:
        sub = scenario.with_sweep_value(parameter, value)
        report = execute_run(sub, out / f"{parameter}_{value:g}")
        rows.append((value, report))
    rows.sort(key=lambda vr: vr[0])
    lines = ["value,min_fidelity,mean_fidelity,final_fidelity"]
    for value, rep in rows:
        lines.append(",".join([
            format_float(value),
            format_float(rep.min_fidelity),
            format_float(rep.mean_fidelity),
            format_float(rep.final_fidelity),
        ]))
    (out / "comparison.csv").write_text("\n".join(lines) + "\n")
    return rows


def _load_scenario(args) -> Scenario:
    if args.preset is not None:
        return preset(args.preset)
    if args.scenario is None:
        raise ScenarioError("cli", "provide --scenario <path> or --preset <name>")
    try:
        text = Path(args.scenario).read_text()
    except OSError as exc:
        raise ScenarioError("cli", f"cannot read {args.scenario}: {exc}") from exc
    return parse_scenario(text)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lyapctrl",
        description="Lyapunov-controlled adiabatic evolution simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, desc in (("run", "execute one scenario"),
                       ("sweep", "execute a parameter sweep")):
        p = sub.add_parser(name, help=desc)
        p.add_argument("--scenario", help="path to a scenario JSON document")
        p.add_argument("--preset", help="name of a built-in scenario")
        p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("presets", help="inspect built-in scenarios")
    psub = p.add_subparsers(dest="presets_command", required=True)
    psub.add_parser("list", help="list preset names")
    show = psub.add_parser("show", help="print a preset as scenario JSON")
    show.add_argument("name")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            scenario = _load_scenario(args)
            report = execute_run(scenario, args.out)
            print(f"run complete: min F {report.min_fidelity:.4f}, "
                  f"mean F {report.mean_fidelity:.4f}, "
                  f"final F {report.final_fidelity:.4f} "
                  f"({report.wall_time_s:.2f}s) -> {args.out}")
        elif args.command == "sweep":
            scenario = _load_scenario(args)
            rows = execute_sweep(scenario, args.out)
            parameter, _ = scenario.sweep
            for value, rep in rows:
                print(f"{parameter}={value:g}: min F {rep.min_fidelity:.4f}, "
                      f"mean F {rep.mean_fidelity:.4f}, "
                      f"final F {rep.final_fidelity:.4f}")
            print(f"comparison table -> {Path(args.out) / 'comparison.csv'}")
        elif args.command == "presets":
            if args.presets_command == "list":
                for name in preset_names():
                    print(name)
            else:
                sys.stdout.write(preset(args.name).echo())
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    except (LyapctrlError, FloatingPointError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
