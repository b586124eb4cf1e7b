"""
Exhaustion of the unit disc by subdiscs D_k and the monotone limit of the
approximating flows.

For each k the flow starts from the smoothed maximum ū_k = u0 + Ψ(h_k - u0)
on D_k, with the constant-curvature ring policy (ring curvature -k^2 from
the h_k branch). The flows decrease in k; the last one, resampled to the
reference grid, is reported as the limit flow.
"""

import concurrent.futures
import logging
import os
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from scripts.common.errors import ConstructionInvariantError, ConvergenceError, UsageError
from scripts.common.file_utils import load_json, safe_save_csv, safe_save_json
from scripts.metrics.conformal import bigbang_factor
from scripts.metrics.cutoff import CutoffSpec
from scripts.metrics.initial_data import exhaustion_grid, restrict_metric, smoothed_max_initial
from scripts.flow.persistence import load_trajectory, save_trajectory
from scripts.flow.schedule import BoundaryPolicy, FlowConfig, snapshot_schedule
from scripts.flow.solver import run
from scripts.flow.trajectory import common_times
from scripts.construction.plan import ExhaustionPlan
from scripts.verification.report import WorstCase, node_tolerance, trajectory_mask

import disc_config

logger = logging.getLogger(__name__)

HISTORY_COLUMNS = ["k", "k_next", "t", "sup_change", "hyperbolic_gap"]
MONOTONICITY_COLUMNS = ["k", "k_next", "t", "margin", "tolerance", "r", "theta"]


def approximate_flow(u0, k, eta, T, cfg, grid=None):
    """The flow on D_k from the smoothed maximum of u0 and h_k."""
    grid = exhaustion_grid(u0.grid, k) if grid is None else grid
    spec = eta if isinstance(eta, CutoffSpec) else CutoffSpec(eta)
    start = smoothed_max_initial(u0, k, spec, grid=grid)
    policy = BoundaryPolicy("constant-curvature")
    metadata = {"k": int(k), "eta": spec.eta, "a": grid.a, "initial": u0.descriptor}
    traj = run(start, policy, T, cfg, metadata=metadata)
    logger.info("k=%d finished on %r (%d snapshots)", k, grid, len(traj))
    return traj


def _run_family(u0, plan, cfg):
    if plan.workers == 1 or len(plan.k_list) == 1:
        return {k: approximate_flow(u0, k, plan.eta, plan.T, cfg, plan.grid_for(k)) for k in plan.k_list}

    trajectories = {}
    with concurrent.futures.ProcessPoolExecutor(max_workers=plan.workers) as executor:
        futures = {
            executor.submit(approximate_flow, u0, k, plan.eta, plan.T, cfg, plan.grid_for(k)): k
            for k in plan.k_list
        }
        for future in concurrent.futures.as_completed(futures):
            k = futures[future]
            trajectories[k] = future.result()
            logger.info("k=%d collected from the worker pool", k)
    return {k: trajectories[k] for k in plan.k_list}


@dataclass
class ConstructionResult:
    plan: ExhaustionPlan
    trajectories: dict
    limit: object
    history: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(columns=HISTORY_COLUMNS))
    monotonicity: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(columns=MONOTONICITY_COLUMNS))
    prechecks: dict = field(default_factory=dict)
    converged: bool = False

    def last_pair_changes(self):
        """sup |u_k - u_k'| per snapshot for the last consecutive pair."""
        if self.history.empty:
            return pd.Series(dtype=float)
        last = self.history[self.history["k_next"] == self.plan.k_max]
        return last.set_index("t")["sup_change"]

    def summary(self):
        return {
            "format_version": disc_config.FORMAT_VERSION,
            "plan": self.plan.to_dict(),
            "converged": bool(self.converged),
            "history": _records(self.history),
            "monotonicity": _records(self.monotonicity),
            "barrier_prechecks": {str(k): v for k, v in self.prechecks.items()},
            "limit": {"grid": self.limit.grid.header(), "times": [float(t) for t in self.limit.times]},
        }


def _records(frame):
    return [{key: (int(value) if key in ("k", "k_next") else float(value)) for key, value in row.items()}
            for row in frame.to_dict(orient="records")]


def compare_pair(plan, lower_k, upper_k, traj_k, traj_next):
    """
    Monotonicity u_{k'} <= u_k + tol and sup |u_k - u_{k'}| per snapshot on
    the comparison grid of the smaller disc.
    """
    grid = plan.comparison_grid(lower_k)
    a = traj_k.resample(grid)
    b = traj_next.resample(grid)
    radius = plan.comparison_radius(lower_k)
    h = max(traj_k.grid.check_spacing(radius), traj_next.grid.check_spacing(radius))
    factor = disc_config.TOLERANCE_FACTOR
    gap = plan.hyperbolic_gap(lower_k, upper_k)
    mask = np.ones(grid.n_nodes, dtype=bool)
    history, monotonicity = [], []
    for t in common_times(a, b):
        ua, ub = a.at(t).values, b.at(t).values
        diff = ub - ua
        tol = factor * h * h * (1.0 + np.abs(ua))
        worst = WorstCase(f"monotone k={lower_k}->{upper_k}", "comparison grid")
        worst.add(t, grid, mask, -diff, tol)
        report = worst.report()
        history.append({"k": lower_k, "k_next": upper_k, "t": t, "sup_change": float(np.max(np.abs(diff))),
                        "hyperbolic_gap": gap})
        monotonicity.append({"k": lower_k, "k_next": upper_k, "t": t, "margin": report.margin,
                             "tolerance": report.tolerance, "r": report.location["r"],
                             "theta": report.location["theta"]})
    return history, monotonicity


def barrier_prechecks(u0, traj):
    """Worst margins of u_k >= bigbang(t) (t > 0) and u_k(t) >= u0 on D_k's check domain."""
    grid = traj.grid
    mask, _ = trajectory_mask(traj)
    base = restrict_metric(u0, grid).u.values
    bigbang = WorstCase("bigbang lower bound", "check")
    initial = WorstCase("initial lower bound", "check")
    for state in traj:
        u = state.u.values
        tol = node_tolerance(grid, u, mask)
        initial.add(state.t, grid, mask, u - base, tol)
        if state.t > 0:
            bigbang.add(state.t, grid, mask, u - bigbang_factor(grid, state.t).values, tol)
    out = {"initial_margin": initial.report().margin}
    if np.any(traj.times > 0):
        out["bigbang_margin"] = bigbang.report().margin
    return out


def construct_limit(u0, plan, cfg=None):
    """
    Run the approximating flows for every k in the plan, check that they
    decrease in k, and return the last one on the reference grid as the limit.

    Raises ConstructionInvariantError when a consecutive pair increases beyond
    tolerance, ConvergenceError (carrying the result) when the last pair still
    differs by limit_tol or more at some snapshot.
    """
    if not np.isclose(u0.grid.a, 1.0):
        raise UsageError(f"initial metric must live on a unit-disc grid, got {u0.grid!r}")
    if cfg is None or not cfg.snapshot_times:
        times = snapshot_schedule(plan.T, disc_config.DEFAULT_SNAPSHOT_COUNT)
        cfg = (cfg or FlowConfig()).with_snapshots(times)

    logger.info("construction: k=%s eta=%g T=%g", list(plan.k_list), plan.eta, plan.T)
    trajectories = _run_family(u0, plan, cfg)

    history, monotonicity = [], []
    for lower_k, upper_k in zip(plan.k_list, plan.k_list[1:]):
        h, m = compare_pair(plan, lower_k, upper_k, trajectories[lower_k], trajectories[upper_k])
        history += h
        monotonicity += m

    prechecks = {k: barrier_prechecks(u0, traj) for k, traj in trajectories.items()}
    limit = trajectories[plan.k_max].resample(plan.reference_grid()).map_fields(
        lambda t, u: u, metadata={"limit": True, "check_fraction": 1.0, "k": plan.k_max}
    )
    result = ConstructionResult(
        plan=plan,
        trajectories=trajectories,
        limit=limit,
        history=pd.DataFrame(history, columns=HISTORY_COLUMNS),
        monotonicity=pd.DataFrame(monotonicity, columns=MONOTONICITY_COLUMNS),
        prechecks=prechecks,
    )

    violations = [row for row in monotonicity if row["margin"] < -row["tolerance"]]
    if violations:
        worst = min(violations, key=lambda row: row["margin"] + row["tolerance"])
        raise ConstructionInvariantError(
            f"u_k increased in k beyond tolerance: k={worst['k']}->{worst['k_next']} at t={worst['t']:g}, "
            f"r={worst['r']:.4g}, margin {worst['margin']:.3e} (tol {worst['tolerance']:.2e})",
            violations=violations,
        )

    changes = result.last_pair_changes()
    result.converged = bool(len(changes) == 0 or (changes < plan.limit_tol).all())
    if not result.converged:
        bad = changes[changes >= plan.limit_tol]
        raise ConvergenceError(
            f"sup |u_k - u_k'| for the last pair is still >= limit_tol={plan.limit_tol:g} at "
            f"t={[float(t) for t in bad.index]} (largest {bad.max():.3e}, disc gap of the pair "
            f"{plan.hyperbolic_gap(plan.k_list[-2], plan.k_max):.3e})",
            history=_records(result.history),
            result=result,
        )
    logger.info("construction converged: last-pair change %.3e", float(changes.max()) if len(changes) else 0.0)
    return result


def maximality_check(candidate, limit, full=False):
    """Worst violation of candidate <= limit + tol over the limit's snapshots and check domain."""
    if len(candidate) == 0:
        raise UsageError("maximality check needs a non-empty candidate trajectory")
    missing = [float(t) for t in candidate.times if limit.index_of(t) is None]
    if missing:
        raise UsageError(f"candidate snapshot times {missing} are not recorded by the limit")
    moved = candidate.resample(limit.grid)
    mask, domain = trajectory_mask(limit, full)
    worst = WorstCase("maximality", domain)
    for state in moved:
        bound = limit.at(state.t).values
        worst.add(state.t, limit.grid, mask, bound - state.u.values, node_tolerance(limit.grid, bound, mask))
    return worst.report()


# --- persistence ---------------------------------------------------------------------

def _k_dir(k):
    return f"k_{k:02d}"


def save_result(result, path):
    for k, traj in result.trajectories.items():
        save_trajectory(traj, os.path.join(path, _k_dir(k)))
    save_trajectory(result.limit, os.path.join(path, "limit"))
    safe_save_csv(result.history, os.path.join(path, "convergence.csv"), "convergence history")
    safe_save_csv(result.monotonicity, os.path.join(path, "monotonicity.csv"), "monotonicity margins")
    summary_path = os.path.join(path, "summary.json")
    if not safe_save_json(result.summary(), summary_path, "construction summary"):
        raise OSError(f"could not write {summary_path}")
    return summary_path


def load_result(path):
    summary_path = os.path.join(path, "summary.json")
    if not os.path.exists(summary_path):
        raise UsageError(f"no construction result at {path} (missing summary.json)")
    summary = load_json(summary_path)
    plan = ExhaustionPlan.from_dict(summary["plan"])
    trajectories = {k: load_trajectory(os.path.join(path, _k_dir(k))) for k in plan.k_list}
    return ConstructionResult(
        plan=plan,
        trajectories=trajectories,
        limit=load_trajectory(os.path.join(path, "limit")),
        history=pd.DataFrame(summary["history"], columns=HISTORY_COLUMNS),
        monotonicity=pd.DataFrame(summary["monotonicity"], columns=MONOTONICITY_COLUMNS),
        prechecks={int(k): v for k, v in summary["barrier_prechecks"].items()},
        converged=summary["converged"],
    )
