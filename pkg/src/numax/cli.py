"""Command-line front end.

Subcommands: generate (synthetic scenario files), solve (single budget),
sweep (budget sweep to CSV with bound envelopes), report (bound report JSON).
Sweep and report can additionally render figures next to their delimited
output via --figures.

Exit codes: 0 success, 2 usage, 3 non-convergence, 4 I/O or bad input file,
5 bound-sandwich violation under --check.  NUMAX_LOG={error,info,debug}
controls diagnostics on standard error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis, wireless
from .eigensolver import SolverConfig, energy_efficiency, solve_canonical, sweep
from .mappings import InterferenceMapping, affine_mapping, constant_mapping
from .norms import MonotoneNormSpec, l1, linf, weighted_lp
from .wireless import Scenario, ScenarioError, ScenarioFormatError

log = logging.getLogger("numax.cli")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NONCONVERGED = 3
EXIT_IO = 4
EXIT_INVARIANT = 5

CSV_COLUMNS = ("p_bar", "utility", "ee_a", "ee_b", "utility_lower", "utility_upper",
               "ee_lower", "ee_upper", "regime", "converged", "iterations")

# Relative slack when self-checking the bound sandwich: absorbs solver
# tolerance in rows where a bound is attained with equality.
_CHECK_SLACK = 1e-9

_DEFAULT_REF_GAIN = 1e-4


@dataclass
class SweepRow:
    """One budget of a sweep, as emitted to CSV."""

    p_bar: float
    utility: float
    ee_a: float
    ee_b: float
    utility_lower: float
    utility_upper: float
    ee_lower: float
    ee_upper: float
    regime: str
    converged: bool
    iterations: int

    def to_csv(self) -> str:
        return ",".join([
            _fmt(self.p_bar), _fmt(self.utility), _fmt(self.ee_a), _fmt(self.ee_b),
            _fmt(self.utility_lower), _fmt(self.utility_upper),
            _fmt(self.ee_lower), _fmt(self.ee_upper),
            self.regime, "true" if self.converged else "false", str(self.iterations),
        ])


def _fmt(value: float) -> str:
    if math.isinf(value):
        return "-inf" if value < 0 else "inf"
    return format(float(value), ".17g")


def _json_default(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"not JSON serializable: {type(value)}")


class UsageError(ValueError):
    """Flag values that argparse cannot catch (ranges, combinations)."""


def load_problem(path) -> tuple[InterferenceMapping, Scenario | None]:
    """Load a problem file: a wireless scenario (the `gains_db` schema) or a
    bundled-style mapping fixture with "type" of "affine" or "constant"."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ScenarioFormatError("problem file must hold a JSON object")
    kind = raw.get("type")
    if kind is None and "gains_db" in raw:
        scenario = wireless.load_scenario(path)
        return wireless.wireless_mapping(scenario), scenario
    label = raw.get("label", "")
    try:
        if kind == "affine":
            return affine_mapping(raw["coupling"], raw["offset"], label=label), None
        if kind == "constant":
            return constant_mapping(raw["offset"], label=label), None
    except KeyError as exc:
        raise ScenarioFormatError(f"missing required field {exc}") from exc
    except ValueError as exc:
        raise ScenarioFormatError(str(exc)) from exc
    raise ScenarioFormatError(
        "cannot tell the problem kind: expected gains_db or type in {affine, constant}")


def build_norm(name: str, dimension: int, weights_arg: str | None) -> MonotoneNormSpec:
    if name == "l1":
        return l1(dimension)
    if name == "linf":
        return linf(dimension)
    if name == "weighted":
        if weights_arg is None:
            raise UsageError("--norm-a/--norm-b weighted requires --norm-weights")
        weights = [float(v) for v in weights_arg.split(",") if v.strip()]
        if len(weights) != dimension or min(weights) <= 0:
            raise UsageError(
                f"--norm-weights needs {dimension} strictly positive values")
        return weighted_lp(weights, 1.0)
    raise UsageError(f"unknown norm {name!r}")


def _solver_config(args) -> SolverConfig:
    if not args.tol > 0:
        raise UsageError("--tol must be strictly positive")
    if args.max_iter < 1:
        raise UsageError("--max-iter must be at least 1")
    return SolverConfig(tolerance=args.tol, max_iterations=args.max_iter)


def cmd_generate(args) -> int:
    if args.bs < 1 or args.users < 1:
        raise UsageError("--bs and --users must be at least 1")
    if not args.area > 0:
        raise UsageError("--area must be strictly positive")
    if args.exponent < 2:
        raise UsageError("--exponent must be at least 2")
    if not args.bandwidth > 0 or not args.ref_gain > 0:
        raise UsageError("--bandwidth and --ref-gain must be strictly positive")
    scenario = wireless.generate_scenario(
        num_bs=args.bs, num_users=args.users, area_m=args.area,
        pathloss_exponent=args.exponent, ref_gain_at_1m=args.ref_gain,
        noise_psd_dbm_hz=args.noise_psd, bandwidth_hz=args.bandwidth, seed=args.seed)
    wireless.save_scenario(scenario, args.out)
    rho = wireless.wireless_lbm(scenario).spectral_radius()
    summary = {"num_users": scenario.num_users, "num_bs": scenario.num_bs,
               "rho": rho, "out": str(args.out)}
    print(json.dumps(summary, default=_json_default))
    return EXIT_OK


def cmd_solve(args) -> int:
    if not args.budget > 0:
        raise UsageError("--budget must be strictly positive")
    config = _solver_config(args)
    mapping, scenario = load_problem(args.scenario)
    norm_a = build_norm(args.norm_a, mapping.dimension, args.norm_weights)
    solution = solve_canonical(mapping, norm_a, args.budget, config)
    report = analysis.bounds_report(mapping, norm_a, norm_a)

    assignment = None
    if scenario is not None:
        recovered = wireless.recover_assignment(scenario, solution.p_star)
        assignment = [
            {"user": j, "bs": int(recovered.bs_index[j]),
             "sinr": float(recovered.sinr[j]), "rate_bps": float(recovered.rate_bps[j])}
            for j in range(scenario.num_users)
        ]
    payload = {
        "c_star": solution.c_star,
        "p_star": solution.p_star.tolist(),
        "lambda_star": solution.lambda_star,
        "assignment": assignment,
        "residual": solution.final_residual,
        "iterations": solution.iterations_used,
        "regime": analysis.regime(args.budget, report),
        "converged": solution.converged,
    }
    print(json.dumps(payload, default=_json_default))
    return EXIT_OK if solution.converged else EXIT_NONCONVERGED


def _build_rows(mapping, norm_a, norm_b, budgets, config) -> tuple[list[SweepRow], analysis.BoundsReport]:
    lbm = analysis.lower_bounding_matrix(mapping)
    report = analysis.bounds_report(mapping, norm_a, norm_b, lbm=lbm)
    solutions = sweep(mapping, norm_a, budgets, config)
    rows = []
    for budget, sol in zip(budgets, solutions):
        u_lo, u_hi = analysis.utility_bounds(mapping, norm_a, budget, lbm, report.beta)
        e_lo, e_hi = analysis.ee_bounds(mapping, norm_a, norm_b, budget, lbm,
                                        report.alpha1, report.alpha2, report.beta)
        if sol.converged:
            ee_a = energy_efficiency(mapping, norm_a, sol)
            ee_b = energy_efficiency(mapping, norm_b, sol)
        else:
            ee_a = ee_b = math.nan
        rows.append(SweepRow(
            p_bar=float(budget), utility=sol.c_star, ee_a=ee_a, ee_b=ee_b,
            utility_lower=u_lo, utility_upper=u_hi, ee_lower=e_lo, ee_upper=e_hi,
            regime=analysis.regime(float(budget), report),
            converged=sol.converged, iterations=sol.iterations_used))
    return rows, report


def check_rows(rows: list[SweepRow], report: analysis.BoundsReport) -> list[str]:
    """Row-wise bound-sandwich verification; returns human-readable violations."""
    problems = []
    for row in rows:
        if not row.converged:
            continue
        if row.utility_lower > row.utility * (1 + _CHECK_SLACK):
            problems.append(f"p_bar={row.p_bar:g}: utility below its lower bound")
        if row.utility > row.utility_upper * (1 + _CHECK_SLACK):
            problems.append(f"p_bar={row.p_bar:g}: utility above its upper bound")
        if row.ee_lower > row.ee_b * (1 + _CHECK_SLACK):
            problems.append(f"p_bar={row.p_bar:g}: EE below its lower bound")
        if row.ee_b > row.ee_upper * (1 + _CHECK_SLACK):
            problems.append(f"p_bar={row.p_bar:g}: EE above its upper bound")
        if report.rho > 0 and not report.rho_approximate:
            if not row.utility < 1.0 / report.rho:
                problems.append(f"p_bar={row.p_bar:g}: utility not strictly below 1/rho")
            if not row.ee_b < report.alpha2 / (report.rho * row.p_bar):
                problems.append(
                    f"p_bar={row.p_bar:g}: EE not strictly below alpha2/(rho*p_bar)")
    return problems


def cmd_sweep(args) -> int:
    if not args.budget_min > 0 or not args.budget_max > 0:
        raise UsageError("budgets must be strictly positive")
    if args.budget_min >= args.budget_max:
        raise UsageError("--budget-min must be strictly below --budget-max")
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    config = _solver_config(args)
    mapping, _ = load_problem(args.scenario)
    norm_a = build_norm(args.norm_a, mapping.dimension, args.norm_weights)
    norm_b = build_norm(args.norm_b, mapping.dimension, args.norm_weights)
    if args.log_spacing:
        budgets = np.geomspace(args.budget_min, args.budget_max, args.points)
    else:
        budgets = np.linspace(args.budget_min, args.budget_max, args.points)

    rows, report = _build_rows(mapping, norm_a, norm_b, budgets, config)
    lines = [",".join(CSV_COLUMNS)] + [row.to_csv() for row in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)

    if args.figures:
        from . import plots
        stem = Path(args.out).stem if args.out else "sweep"
        for path in plots.render_sweep_figures(rows, report, args.figures, stem,
                                               title=mapping.label):
            log.info("wrote %s", path)

    if args.check:
        problems = check_rows(rows, report)
        if problems:
            for problem in problems:
                print(f"check: {problem}", file=sys.stderr)
            return EXIT_INVARIANT
    if any(not row.converged for row in rows):
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_report(args) -> int:
    mapping, _ = load_problem(args.scenario)
    norm_a = build_norm(args.norm_a, mapping.dimension, args.norm_weights)
    norm_b = build_norm(args.norm_b, mapping.dimension, args.norm_weights)
    report = analysis.bounds_report(mapping, norm_a, norm_b)
    text = json.dumps(report.to_json_dict(), default=_json_default, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.figures:
        from . import plots
        stem = Path(args.scenario).stem
        for path in plots.render_bound_envelopes(mapping, norm_a, norm_b, report,
                                                 args.figures, stem,
                                                 title=mapping.label):
            log.info("wrote %s", path)
    return EXIT_OK


def _add_norm_flags(parser, both: bool):
    parser.add_argument("--norm-a", choices=("l1", "linf", "weighted"), default="linf",
                        help="budget norm (default: linf, a per-user cap)")
    if both:
        parser.add_argument("--norm-b", choices=("l1", "linf", "weighted"),
                            default="linf", help="energy-efficiency norm")
    parser.add_argument("--norm-weights", default=None,
                        help="comma-separated weights for the weighted norm")


def _add_solver_flags(parser):
    parser.add_argument("--tol", type=float, default=1e-12,
                        help="relative fixed-point residual (default 1e-12)")
    parser.add_argument("--max-iter", type=int, default=100_000,
                        help="iteration cap per solve (default 100000)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="numax",
        description="Max-min utility maximization: fixed-point solves, budget "
                    "sweeps, bound envelopes and power-regime reports.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic scenario file")
    gen.add_argument("--bs", type=int, required=True, help="number of base stations")
    gen.add_argument("--users", type=int, required=True, help="number of users")
    gen.add_argument("--area", type=float, default=500.0, help="square side [m]")
    gen.add_argument("--exponent", type=float, default=3.5, help="pathloss exponent")
    gen.add_argument("--noise-psd", type=float, default=-145.0,
                     help="noise PSD [dBm/Hz] (default -145)")
    gen.add_argument("--bandwidth", type=float, default=1e7,
                     help="system bandwidth [Hz] (default 1e7)")
    gen.add_argument("--ref-gain", type=float, default=_DEFAULT_REF_GAIN,
                     help="linear pathgain at 1 m")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output scenario path")
    gen.set_defaults(handler=cmd_generate)

    solve = sub.add_parser("solve", help="solve one budget, JSON on stdout")
    solve.add_argument("--scenario", required=True)
    solve.add_argument("--budget", type=float, required=True, help="power budget [W]")
    _add_norm_flags(solve, both=False)
    _add_solver_flags(solve)
    solve.set_defaults(handler=cmd_solve)

    swp = sub.add_parser("sweep", help="budget sweep, CSV with bound envelopes")
    swp.add_argument("--scenario", required=True)
    swp.add_argument("--budget-min", type=float, required=True)
    swp.add_argument("--budget-max", type=float, required=True)
    swp.add_argument("--points", type=int, default=50)
    swp.add_argument("--log-spacing", action=argparse.BooleanOptionalAction,
                     default=True, help="log-spaced budgets (default)")
    _add_norm_flags(swp, both=True)
    _add_solver_flags(swp)
    swp.add_argument("--out", default=None, help="CSV path (default: stdout)")
    swp.add_argument("--check", action="store_true",
                     help="verify the bound sandwich row-wise; exit 5 on violation")
    swp.add_argument("--figures", default=None, metavar="DIR",
                     help="also render utility/EE figures into DIR")
    swp.set_defaults(handler=cmd_sweep)

    rep = sub.add_parser("report", help="bound report, JSON")
    rep.add_argument("--scenario", required=True)
    _add_norm_flags(rep, both=True)
    rep.add_argument("--out", default=None, help="JSON path (default: stdout)")
    rep.add_argument("--figures", default=None, metavar="DIR",
                     help="also render bound-envelope figures into DIR")
    rep.set_defaults(handler=cmd_report)
    return parser


def _configure_logging():
    level = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("NUMAX_LOG", "error").lower(), logging.ERROR)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("numax %(levelname)s: %(message)s"))
    root = logging.getLogger("numax")
    root.handlers.clear()
    root.addHandler(handler)
    root.setLevel(level)


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"numax: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScenarioError as exc:
        print(f"numax: bad scenario: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"numax: {exc}", file=sys.stderr)
        return EXIT_IO


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
