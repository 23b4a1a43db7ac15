"""Command-line interface.

Subcommands: simulate, montecarlo, predict-bounds, verify, check-gains.
Exit status 0 on success/pass, 1 on validation failure, 2 on a violated or
unattainable bound. The output directory defaults to the current directory
and can be overridden by --out or the FTACS_OUT_DIR environment variable.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from .bounds import DEFAULT_ETA, compute_coefficients, predict
from .controller import check_gain_conditions, robust_coefficients
from .errors import BoundViolated, FtacsError, GainConditionViolated, NotContractive
from .harness import (
    export_bound_trace_jsonl,
    export_summary_jsonl,
    export_trace_csv,
    run_campaign,
    run_scenario,
    steady_state_stats,
    verify,
)
from .scenario import PRESETS, load_scenario

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_VIOLATED = 2


def _out_dir(args) -> Path:
    out = getattr(args, "out", None) or os.environ.get("FTACS_OUT_DIR") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load(args):
    return load_scenario(args.scenario)


def cmd_simulate(args) -> int:
    scenario = _load(args)
    trace = run_scenario(scenario, seed=args.seed)
    stats = steady_state_stats(trace, scenario.tail_fraction)
    out = _out_dir(args) / f"{scenario.name}-seed{trace.seed}.csv"
    export_trace_csv(trace, out)
    print(f"wrote {out}")
    print(
        f"tail maxima: theta_e {stats.theta_e_max_deg:.6g} deg, "
        f"|omega_e| {math.degrees(stats.omega_e_max):.6g} deg/s, "
        f"|qe_vec| {stats.qe_vec_max:.6g}"
    )
    return EXIT_OK


def cmd_montecarlo(args) -> int:
    scenario = _load(args)
    summary = run_campaign(scenario, args.n, eta=args.eta)
    out = _out_dir(args) / f"{scenario.name}-campaign-n{args.n}.jsonl"
    export_summary_jsonl(summary, out)
    print(f"wrote {out}")
    print(
        f"campaign maxima over {args.n} instances: "
        f"theta_e {summary.theta_e_max_deg:.6g} deg, "
        f"|omega_e| {math.degrees(summary.omega_e_max):.6g} deg/s"
    )
    if summary.failures:
        for line in summary.failures:
            print(f"FAILED: {line}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def cmd_predict_bounds(args) -> int:
    scenario = _load(args)
    if scenario.budget is None:
        print("scenario has no uncertainty budget", file=sys.stderr)
        return EXIT_INVALID
    try:
        trace = predict(scenario.budget, scenario.gains, eta=args.eta, run_loop2=not args.no_loop2)
    except (GainConditionViolated, NotContractive) as exc:
        print(f"prediction failed: {exc}", file=sys.stderr)
        return EXIT_VIOLATED
    out = _out_dir(args) / f"{scenario.name}-bounds.jsonl"
    export_bound_trace_jsonl(trace, out)
    print(f"wrote {out}")
    print(
        f"iterations {trace.total_iterations} (loop2 "
        f"{'active' if trace.loop2 else 'inactive'}); "
        f"|qe| bound {trace.q_final:.6g}, "
        f"|omega_e| bound {math.degrees(trace.omega_bound):.6g} deg/s, "
        f"theta_e bound {math.degrees(trace.theta_bound):.6g} deg"
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    scenario = _load(args)
    try:
        report = verify(scenario, args.n, eta=args.eta, strict=True)
    except BoundViolated as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return EXIT_VIOLATED
    out = _out_dir(args) / f"{scenario.name}-verify-n{args.n}.json"
    out.write_text(json.dumps(report, indent=2) + "\n")
    print(f"wrote {out}")
    print(
        f"PASS: theta_e tail max {report['theta_tail_max_deg']:.6g} deg <= "
        f"bound {report['theta_bound_deg']:.6g} deg "
        f"(margin x{report['theta_margin_ratio']:.2f}); "
        f"|omega_e| tail max {math.degrees(report['omega_tail_max_rad_s']):.6g} deg/s <= "
        f"bound {math.degrees(report['omega_bound_rad_s']):.6g} deg/s "
        f"(margin x{report['omega_margin_ratio']:.2f})"
    )
    return EXIT_OK


def cmd_check_gains(args) -> int:
    scenario = _load(args)
    if scenario.budget is None:
        print("scenario has no uncertainty budget", file=sys.stderr)
        return EXIT_INVALID
    coeffs = robust_coefficients(scenario.budget, scenario.gains.k)
    report = check_gain_conditions(scenario.gains, coeffs, scenario.budget)
    full = compute_coefficients(scenario.budget, scenario.gains)
    print(
        f"lambda_min(K) = {report.lambda_min_K:.6g} vs threshold "
        f"{report.k_threshold:.6g}: {'PASS' if report.k_condition else 'FAIL'} "
        f"(margin {report.k_margin:.6g})"
    )
    print(
        f"epsilon = {report.epsilon:.6g} vs rho_s = {report.rho_s:.6g}: "
        f"{'PASS' if report.epsilon_condition else 'FAIL'} "
        f"(margin {report.epsilon_margin:.6g})"
    )
    print(f"kappa = {full.kappa:.6g}, kappa' = {full.kappa_prime:.6g}")
    return EXIT_OK if report.passed else EXIT_VIOLATED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ftacs",
        description="Fault-tolerant attitude tracking simulation and "
        "steady-state bound prediction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    preset_help = f"preset name ({', '.join(PRESETS)}) or YAML scenario file"

    p = sub.add_parser("simulate", help="run one closed-loop instance, export CSV trace")
    p.add_argument("--scenario", required=True, help=preset_help)
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("montecarlo", help="run an n-instance campaign, export JSONL summary")
    p.add_argument("--scenario", required=True, help=preset_help)
    p.add_argument("-n", type=int, default=10, help="number of instances (default 10)")
    p.add_argument("--eta", type=float, default=DEFAULT_ETA)
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=cmd_montecarlo)

    p = sub.add_parser("predict-bounds", help="run the fixed-point bound prediction")
    p.add_argument("--scenario", required=True, help=preset_help)
    p.add_argument("--eta", type=float, default=DEFAULT_ETA, help="convergence tolerance")
    p.add_argument("--no-loop2", action="store_true", help="skip the boundary-layer refinement")
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=cmd_predict_bounds)

    p = sub.add_parser("verify", help="check that campaign tail maxima stay within bounds")
    p.add_argument("--scenario", required=True, help=preset_help)
    p.add_argument("-n", type=int, default=10, help="number of instances (default 10)")
    p.add_argument("--eta", type=float, default=DEFAULT_ETA)
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("check-gains", help="evaluate the stability gain conditions")
    p.add_argument("--scenario", required=True, help=preset_help)
    p.set_defaults(func=cmd_check_gains)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FtacsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
