"""Command-line front end: ``subcarrier-ia <command> ...``.

Exit status is 0 on success, 2 for invalid input, 1 for runtime failures.
"""

from __future__ import annotations

import argparse
import json
import sys

from .alignment import (
    build_system,
    feasibility,
    max_normalized_leakage,
    solve_beamformers,
)
from .channel import ScenarioConfig, SubcarrierPair, channel_at, load_scenario
from .los import spacing_analysis
from .sim import SweepConfig, dfmin_distribution, run_sweep, sweep_to_json


class InputError(Exception):
    pass


def _complex_list(vectors):
    return [[{"re": float(z.real), "im": float(z.imag)} for z in vec] for vec in vectors]


def _add_scenario_args(p):
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--direct-range", type=float, nargs=2, default=(150.0, 250.0), metavar=("LOW", "HIGH"))
    p.add_argument("--cross-range", type=float, nargs=2, default=(250.0, 350.0), metavar=("LOW", "HIGH"))
    p.add_argument("--gamma", type=float, default=3.76, help="path-loss exponent")
    p.add_argument("--wave-speed", type=float, default=3e8, help="m/s")


def _scenario_config(args) -> ScenarioConfig:
    return ScenarioConfig(
        k=args.k,
        direct_distance_range=tuple(args.direct_range),
        cross_distance_range=tuple(args.cross_range),
        path_loss_exponent=args.gamma,
        wave_speed=args.wave_speed,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subcarrier-ia",
        description="Interference alignment over two OFDM subcarriers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="Monte Carlo sum-rate versus normalized spacing")
    _add_scenario_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--snr-db", type=float, default=20.0)
    p.add_argument("--x-max", type=float, default=3.0)
    p.add_argument("--x-points", type=int, default=61)
    p.add_argument("--grid-per-dfmin", type=int, default=20)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default="-", help="file path or '-' for stdout")
    p.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("dfmin-dist", help="distribution of the minimal feasible spacing")
    _add_scenario_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--output", default="-")

    for name, helptext in (
        ("solve", "zero-forcing beamformers for a scenario file"),
        ("feasibility", "alignment feasibility residuals for a scenario file"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--scenario", required=True)
        p.add_argument("--delta-f", type=float, required=True, help="subcarrier spacing in Hz")
        p.add_argument("--f0", type=float, default=0.0, help="first subcarrier frequency in Hz")
        p.add_argument("--tol-amp", type=float, default=1e-9)
        p.add_argument("--tol-phase", type=float, default=1e-9)
        p.add_argument("--output", default="-")

    p = sub.add_parser("spacing", help="minimal feasible spacing of a three-pair scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--output", default="-")
    return parser


def _load(path):
    try:
        return load_scenario(path)
    except OSError as exc:
        raise InputError(f"cannot read scenario {path}: {exc.strerror or exc}") from exc
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _channels(args):
    scn = _load(args.scenario)
    if not args.delta_f > 0:
        raise InputError("--delta-f must be > 0")
    return channel_at(scn, SubcarrierPair.from_spacing(args.delta_f, args.f0))


def _cmd_solve(args) -> str:
    ch = _channels(args)
    sys_ = build_system(ch)
    report = feasibility(sys_, args.tol_amp, args.tol_phase)
    bf = solve_beamformers(sys_)
    doc = {
        "u": _complex_list(bf.u),
        "v": _complex_list(bf.v),
        "max_leakage": max_normalized_leakage(ch, bf),
        "feasible": report.feasible,
        "residuals": {
            "amplitude": list(report.amplitude_residuals),
            "phase": list(report.phase_residuals),
        },
    }
    return json.dumps(doc, indent=2)


def _cmd_feasibility(args) -> str:
    report = feasibility(build_system(_channels(args)), args.tol_amp, args.tol_phase)
    return json.dumps(report.to_dict(), indent=2)


def _cmd_spacing(args) -> str:
    sa = spacing_analysis(_load(args.scenario))
    return json.dumps(
        {
            "delta_tau_sum": sa.delta_tau_sum,
            "delta_f_min": None if sa.degenerate else sa.delta_f_min,
            "degenerate": sa.degenerate,
        },
        indent=2,
    )


def _cmd_sweep(args) -> str:
    cfg = SweepConfig(
        scenario=_scenario_config(args),
        snr_db=args.snr_db,
        trials=args.trials,
        x_max=args.x_max,
        x_points=args.x_points,
        grid_per_dfmin=args.grid_per_dfmin,
        master_seed=args.seed,
    )
    result = run_sweep(cfg, workers=args.threads)
    problems = result.violations()
    if problems:
        raise RuntimeError("sweep result failed consistency checks: " + "; ".join(problems))
    if args.format == "json":
        return sweep_to_json(result, cfg)
    return result.to_csv_string()


def _cmd_dfmin(args) -> str:
    summary = dfmin_distribution(_scenario_config(args), args.trials, args.seed)
    return json.dumps(summary.to_dict(), indent=2)


COMMANDS = {
    "sweep": _cmd_sweep,
    "dfmin-dist": _cmd_dfmin,
    "solve": _cmd_solve,
    "feasibility": _cmd_feasibility,
    "spacing": _cmd_spacing,
}


def _emit(text: str, path: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise RuntimeError(f"cannot write {path}: {exc.strerror or exc}") from exc


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text = COMMANDS[args.command](args)
        _emit(text, args.output)
    except (InputError, ValueError) as exc:
        print(f"subcarrier-ia {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"subcarrier-ia {args.command}: failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
