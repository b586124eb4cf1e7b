"""
Command line for the Ricci flow disc laboratory.

    exact       closed-form reference trajectory (bigbang | expanding)
    run         one solver run from an initial-metric descriptor
    construct   exhaustion by subdiscs and the limit flow
    verify      named verifiers on a stored trajectory, JSON report bundle
    compare     direct | geometric | uniqueness comparison of two trajectories
    export      plot-ready CSV tables (and PNGs with --plot)

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration
error, 3 numerical divergence.
"""

import argparse
import logging
import os
import sys
from typing import Optional, Sequence

from scripts.analysis.plots import plot_curvature_series, plot_radial_profiles
from scripts.analysis.profiles import profile_columns, radial_profiles, time_series
from scripts.common import console
from scripts.common.config import int_list, load_config
from scripts.common.errors import (
    EXIT_CHECK_FAILED,
    EXIT_OK,
    ConfigError,
    ConvergenceError,
    HypothesisError,
    PreconditionError,
    RicciDiscError,
    UsageError,
    exit_code_for,
)
from scripts.common.file_utils import safe_save_csv, safe_save_json
from scripts.metrics.initial_data import initial_metric
from scripts.flow.persistence import MANIFEST, load_trajectory, save_trajectory
from scripts.flow.schedule import EXACT_SOLUTIONS
from scripts.flow.solver import run
from scripts.flow.trajectory import exact_trajectory
from scripts.construction.exhaustion import construct_limit, load_result, maximality_check, save_result
from scripts.verification.comparison import direct_comparison, geometric_comparison, uniqueness_chain
from scripts.verification.curvature import (
    admissibility_report,
    approximate_flow_bounds,
    barrier_report,
    curvature_sandwich,
    ode_curvature_bound,
)
from scripts.verification.report import VerifierReport, write_bundle
from scripts.verification.transforms import supersolution_transform, time_shift_transform

logger = logging.getLogger(__name__)

# dest -> (config section, key)
FLAG_KEYS = {
    "n_r": ("grid", "n_r"),
    "n_theta": ("grid", "n_theta"),
    "clustering": ("grid", "clustering"),
    "collar": ("grid", "collar"),
    "scheme": ("flow", "scheme"),
    "cfl_safety": ("flow", "cfl_safety"),
    "dt_max": ("flow", "dt_max"),
    "horizon": ("flow", "horizon"),
    "snapshots": ("flow", "snapshots"),
    "policy": ("flow", "policy"),
    "k_list": ("plan", "k_list"),
    "limit_tol": ("plan", "limit_tol"),
    "scale_n_r": ("plan", "scale_n_r"),
    "n_r_max": ("plan", "n_r_max"),
    "reference_radius": ("plan", "reference_radius"),
    "n_r_reference": ("plan", "n_r_reference"),
    "workers": ("plan", "workers"),
    "eta": ("cutoff", "eta"),
    "initial": ("initial", "descriptor"),
}

DEFAULT_CHECKS = ("barriers", "sandwich", "admissibility")
COMPARISON_CHECKS = ("direct", "geometric", "maximality", "uniqueness-chain")
SUPERSOLUTION_EPS = (0.1, 0.01)


def _names(text):
    return tuple(item for item in text.replace(" ", "").split(",") if item)


# --- argument groups ---------------------------------------------------------------

def _common_parent():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("-c", "--config", default=None, help="Experiment config file (key=value with sections)")
    parent.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    parent.add_argument("-q", "--quiet", action="store_true", help="No banners or progress lines")
    parent.add_argument("--out", default=None, help="Output path; relative paths land under the output root")
    return parent


def _grid_parent():
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("grid")
    group.add_argument("--n-r", dest="n_r", type=int, default=None)
    group.add_argument("--n-theta", dest="n_theta", type=int, default=None, help="1 selects the radial fast path")
    group.add_argument("--clustering", type=float, default=None)
    group.add_argument("--collar", type=float, default=None)
    return parent


def _flow_parent():
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("flow")
    group.add_argument("--scheme", default=None, help="explicit-rk2 | semi-implicit")
    group.add_argument("--cfl-safety", dest="cfl_safety", type=float, default=None)
    group.add_argument("--dt-max", dest="dt_max", type=float, default=None)
    group.add_argument("-T", "--horizon", type=float, default=None)
    group.add_argument("--snapshots", type=int, default=None, help="Number of snapshot intervals on [0, T]")
    return parent


def _initial_parent():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--initial", default=None, help="Initial metric, e.g. restricted-hyperbolic:R=2.0")
    return parent


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ricci-disc",
        description="Numerical laboratory for instantaneously complete Ricci flow on the unit disc",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common, grid, flow, initial = _common_parent(), _grid_parent(), _flow_parent(), _initial_parent()

    exact = sub.add_parser("exact", parents=[common, grid, flow], help="Closed-form reference trajectory")
    exact.add_argument("solution", choices=EXACT_SOLUTIONS)
    exact.add_argument("--a", type=float, default=1.0, help="Disc radius of the expanding solution")
    exact.set_defaults(handler=cmd_exact)

    run_cmd = sub.add_parser("run", parents=[common, grid, flow, initial], help="Single solver run")
    run_cmd.add_argument("--policy", default=None,
                         help="frozen | constant-curvature[:c0=..] | prescribed:<bigbang|expanding>[:a=..,t0=..]")
    run_cmd.set_defaults(handler=cmd_run)

    construct = sub.add_parser("construct", parents=[common, grid, flow, initial],
                               help="Exhaustion by subdiscs and the limit flow")
    construct.add_argument("--k-list", dest="k_list", type=int_list, default=None, help="Comma separated, e.g. 2,4,8")
    construct.add_argument("--eta", type=float, default=None, help="Cutoff width")
    construct.add_argument("--limit-tol", dest="limit_tol", type=float, default=None)
    construct.add_argument("--workers", type=int, default=None)
    construct.add_argument("--fixed-n-r", dest="scale_n_r", action="store_const", const=False, default=None,
                           help="Use the base n_r on every subdisc")
    construct.add_argument("--n-r-max", dest="n_r_max", type=int, default=None)
    construct.add_argument("--reference-radius", dest="reference_radius", type=float, default=None)
    construct.add_argument("--n-r-reference", dest="n_r_reference", type=int, default=None)
    construct.set_defaults(handler=cmd_construct)

    verify = sub.add_parser("verify", parents=[common], help="Run verifiers, write a report bundle")
    verify.add_argument("trajectory", help="Trajectory directory or construction result directory")
    verify.add_argument("--against", default=None, help="Second trajectory for comparison checks")
    verify.add_argument("--checks", type=_names, default=DEFAULT_CHECKS,
                        help=f"Comma separated from {sorted(VERIFY_CHECKS)}")
    verify.add_argument("--eps", type=float, nargs="+", default=None,
                        help="Admissibility / ODE bound times (default: first positive snapshot)")
    verify.add_argument("--super-eps", dest="super_eps", type=float, nargs="+", default=SUPERSOLUTION_EPS)
    verify.add_argument("--eta", type=float, default=None, help="Cutoff width for approximate-flow bounds")
    verify.add_argument("--C", dest="C", type=float, default=None, help="Curvature bound for comparisons")
    verify.add_argument("--delta", type=float, default=0.1, help="Time shift")
    verify.add_argument("--full", action="store_true", help="Check the full domain, collar included")
    verify.set_defaults(handler=cmd_verify)

    compare = sub.add_parser("compare", parents=[common], help="Compare two trajectories")
    compare.add_argument("first")
    compare.add_argument("second")
    compare.add_argument("--mode", choices=("direct", "geometric", "uniqueness"), default="direct")
    compare.add_argument("--C", dest="C", type=float, default=1.0)
    compare.add_argument("--delta", type=float, default=0.1)
    compare.add_argument("--full", action="store_true")
    compare.set_defaults(handler=cmd_compare)

    export = sub.add_parser("export", parents=[common], help="Plot-ready tables")
    export.add_argument("trajectory")
    export.add_argument("--format", choices=("csv", "columns"), default="csv")
    export.add_argument("--times", type=float, nargs="+", default=None)
    export.add_argument("--plot", action="store_true", help="Also write PNG figures")
    export.set_defaults(handler=cmd_export)
    return parser


def _experiment_config(args):
    config = load_config(args.config)
    for dest, (section, key) in FLAG_KEYS.items():
        config.override(section, key, getattr(args, dest, None))
    return config


def _out(args, config, default):
    return config.output_path(args.out or default)


def _load(path):
    """A trajectory directory, or the limit of a construction result directory."""
    if not os.path.exists(os.path.join(path, MANIFEST)) and os.path.exists(os.path.join(path, "summary.json")):
        logger.info("%s holds a construction result, using its limit", path)
        return load_result(path).limit
    return load_trajectory(path)


# --- exact / run / construct -------------------------------------------------------

def cmd_exact(args, config):
    if args.solution == "bigbang" and args.a != 1.0:
        raise ConfigError(f"the big-bang solution lives on the unit disc, got a={args.a}")
    grid = config.grid(a=args.a)
    times = config.snapshot_times()
    if args.solution == "bigbang":
        times = tuple(t for t in times if t > 0)
        if not times:
            raise ConfigError("big-bang is defined for t > 0 only; raise the horizon")
    out = _out(args, config, f"exact_{args.solution}")

    console.banner(f"EXACT SOLUTION: {args.solution}", f"{grid!r}, {len(times)} snapshots")
    traj = exact_trajectory(args.solution, grid, times, args.a)
    save_trajectory(traj, out)
    console.ok(f"Saved {args.solution} trajectory to: {out}")
    return EXIT_OK


def cmd_run(args, config):
    grid = config.grid()
    cfg = config.flow_config()
    policy = config.policy()
    T = config.horizon
    metric = initial_metric(config.descriptor, grid)
    out = _out(args, config, "run")

    console.banner("SOLVER RUN", f"{config.descriptor} on {grid!r}, policy {policy.describe()}, T={T:g}")
    traj = run(metric, policy, T, cfg)
    save_trajectory(traj, out)
    safe_save_json(config.to_dict(), os.path.join(out, "experiment.json"), "experiment config")
    console.ok(f"{len(traj)} snapshots, {len(traj.diagnostics)} steps")
    if len(traj.diagnostics):
        last = traj.diagnostics.iloc[-1]
        console.detail(f"last step: t={last['t']:.6g}, K in [{last['min_K']:.6g}, {last['max_K']:.6g}]")
    console.ok(f"Saved trajectory to: {out}")
    return EXIT_OK


def cmd_construct(args, config):
    plan = config.plan()
    cfg = config.flow_config()
    u0 = initial_metric(config.descriptor, config.grid())
    out = _out(args, config, "construction")

    console.banner("EXHAUSTION CONSTRUCTION",
                   f"{config.descriptor}, k={list(plan.k_list)}, eta={plan.eta:g}, T={plan.T:g}")
    try:
        result = construct_limit(u0, plan, cfg)
    except ConvergenceError as exc:
        if exc.result is not None:
            save_result(exc.result, out)
            console.warn(f"Partial result saved to: {out}")
        raise
    save_result(result, out)
    safe_save_json(config.to_dict(), os.path.join(out, "experiment.json"), "experiment config")

    changes = result.last_pair_changes()
    if len(changes):
        console.ok(f"Monotone in k; last-pair sup change {changes.max():.3e} < limit_tol {plan.limit_tol:g}")
    for k, checks in sorted(result.prechecks.items()):
        console.detail(f"k={k}: " + ", ".join(f"{name} {value:+.3e}" for name, value in sorted(checks.items())))
    console.ok(f"Saved construction to: {out}")
    return EXIT_OK


# --- verify / compare ----------------------------------------------------------------

def _failed(check, exc):
    """A hypothesis or precondition failure recorded as a failing report."""
    margin = getattr(exc, "margin", float("nan"))
    details = {"error": str(exc), "kind": type(exc).__name__}
    if isinstance(exc, HypothesisError):
        details["hypothesis"] = exc.hypothesis
    location = getattr(exc, "location", None) or {}
    return VerifierReport(check, margin, 0.0, {k: v for k, v in location.items() if k in ("t", "r", "theta")},
                          details=details)


def _default_eps(traj):
    positive = [float(t) for t in traj.times if t > 0]
    if not positive:
        raise UsageError("trajectory has no snapshot at t > 0; pass --eps explicitly")
    return [positive[0]]


def _against(ctx):
    if ctx["against"] is None:
        raise UsageError("comparison checks need --against <trajectory>")
    return ctx["against"]


def _comparison_C(ctx):
    if ctx["C"] is None:
        raise UsageError("geometric and uniqueness checks need --C")
    return ctx["C"]


def _time_shift(ctx):
    shifted = time_shift_transform(ctx["traj"], _comparison_C(ctx), ctx["delta"], full=ctx["full"])
    return [VerifierReport.from_dict(item) for item in shifted.metadata["reports"]]


VERIFY_CHECKS = {
    "barriers": lambda c: barrier_report(c["traj"], full=c["full"]),
    "sandwich": lambda c: [curvature_sandwich(c["traj"], full=c["full"])],
    "admissibility": lambda c: [admissibility_report(c["traj"], c["eps"], full=c["full"])[1]],
    "approximate": lambda c: approximate_flow_bounds(c["traj"], c["eta"], full=c["full"]),
    "ode": lambda c: [ode_curvature_bound(c["traj"], eps, full=c["full"]) for eps in c["eps"]],
    "supersolution": lambda c: [supersolution_transform(c["traj"], eps, full=c["full"])[1]
                                for eps in c["super_eps"]],
    "time-shift": _time_shift,
    "direct": lambda c: [direct_comparison(c["traj"], _against(c), full=c["full"])],
    "geometric": lambda c: [geometric_comparison(c["traj"], _against(c), _comparison_C(c), full=c["full"])],
    "maximality": lambda c: [maximality_check(c["traj"], _against(c), full=c["full"])],
    "uniqueness-chain": lambda c: uniqueness_chain(c["traj"], _against(c), _comparison_C(c), c["delta"],
                                                   full=c["full"]),
}


def _print_reports(reports):
    for report in reports:
        if report.passed:
            console.ok(report.summary_line())
        else:
            console.warn(report.summary_line())


def cmd_verify(args, config):
    unknown = [name for name in args.checks if name not in VERIFY_CHECKS]
    if unknown or not args.checks:
        raise UsageError(f"unknown or empty checks {unknown or list(args.checks)}, expected names from "
                         f"{sorted(VERIFY_CHECKS)}")
    traj = _load(args.trajectory)
    against = _load(args.against) if args.against else None
    if against is None and any(name in COMPARISON_CHECKS for name in args.checks):
        raise UsageError(f"checks {[n for n in args.checks if n in COMPARISON_CHECKS]} need --against")
    ctx = {
        "traj": traj,
        "against": against,
        "eps": args.eps or _default_eps(traj),
        "super_eps": args.super_eps,
        "eta": args.eta if args.eta is not None else traj.metadata.get("eta", config.get("cutoff", "eta")),
        "C": args.C,
        "delta": args.delta,
        "full": args.full,
    }
    out = _out(args, config, os.path.join("reports", "verify.json"))

    console.banner("VERIFY", f"{args.trajectory}: {', '.join(args.checks)}")
    reports = []
    for name in args.checks:
        try:
            reports += VERIFY_CHECKS[name](ctx)
        except (HypothesisError, PreconditionError) as exc:
            reports.append(_failed(name, exc))
    _print_reports(reports)
    payload = write_bundle(reports, out, {"trajectory": args.trajectory, "against": args.against,
                                          "checks": list(args.checks)})
    console.ok(f"Saved report bundle to: {out}")
    return EXIT_OK if payload["pass"] else EXIT_CHECK_FAILED


def cmd_compare(args, config):
    first, second = _load(args.first), _load(args.second)
    out = _out(args, config, os.path.join("reports", f"compare_{args.mode}.json"))

    console.banner(f"COMPARE ({args.mode})", f"{args.first} vs {args.second}")
    if args.mode == "direct":
        reports = [direct_comparison(first, second, full=args.full)]
    elif args.mode == "geometric":
        reports = [geometric_comparison(first, second, args.C, full=args.full)]
    else:
        reports = uniqueness_chain(first, second, args.C, args.delta, full=args.full)
    _print_reports(reports)
    payload = write_bundle(reports, out, {"first": args.first, "second": args.second, "mode": args.mode})
    console.ok(f"Saved report to: {out}")
    return EXIT_OK if payload["pass"] else EXIT_CHECK_FAILED


# --- export --------------------------------------------------------------------------

def cmd_export(args, config):
    traj = _load(args.trajectory)
    if len(traj) == 0:
        raise UsageError(f"{args.trajectory} holds no snapshots")
    name = os.path.basename(os.path.normpath(args.trajectory))
    out = _out(args, config, os.path.join("export", name))

    console.banner("EXPORT", f"{args.trajectory} as {args.format}")
    if args.format == "csv":
        profiles = radial_profiles(traj, args.times)
        safe_save_csv(profiles, os.path.join(out, "profiles.csv"), "radial profiles")
    else:
        safe_save_csv(profile_columns(traj, args.times), os.path.join(out, "profiles_columns.csv"),
                      "radial profile columns")
    series = time_series(traj)
    safe_save_csv(series, os.path.join(out, "series.csv"), "time series")
    console.ok(f"Saved tables to: {out}")

    if args.plot:
        plot_radial_profiles(profile_columns(traj, args.times), os.path.join(out, "profiles.png"),
                             title=f"Radial profiles: {name}")
        plot_curvature_series(series, os.path.join(out, "curvature.png"), title=f"Curvature: {name}")
        console.ok("Saved plots")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    console.setup_logging(args.verbose)
    console.set_quiet(args.quiet)
    try:
        config = _experiment_config(args)
        return int(args.handler(args, config))
    except RicciDiscError as exc:
        console.fail(f"{type(exc).__name__}: {exc}")
        return exit_code_for(exc)
    except OSError as exc:
        console.fail(f"{type(exc).__name__}: {exc}")
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
