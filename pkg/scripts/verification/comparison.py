"""
Comparison principles as numerical oracles.

schwarz_check           Schwarz-Yau lemma with the identity map: a complete g1
                        with K >= -a1 dominates g2 with K <= -a2 up to a1/a2
direct_comparison       ordered initial data and dominating ring data keep
                        two flows ordered
geometric_comparison    the conformal-ratio comparison with hypotheses
                        (i) |K[g2]| <= C, (ii) K[g1] <= C, (iii) Q <= C
uniqueness_experiment   two independent constructions of the limit flow agree
uniqueness_chain        the uniqueness argument run on recorded flows

Hypothesis failures raise HypothesisError naming the hypothesis; failed
conclusions come back as failing reports.
"""

import logging

import numpy as np

from scripts.common.errors import ConfigError, HypothesisError, PreconditionError, UsageError
from scripts.metrics.conformal import gauss_curvature
from scripts.flow.trajectory import common_times
from scripts.construction.exhaustion import construct_limit
from scripts.verification.curvature import completeness_proxy
from scripts.verification.report import VerifierReport, WorstCase, check_mask, node_tolerance, trajectory_mask
from scripts.verification.transforms import time_shift_transform

logger = logging.getLogger(__name__)

DIRECT_ATOL = 1e-6


def _hypothesis(condition_margin, tol, name, message):
    if condition_margin < -tol:
        raise HypothesisError(f"hypothesis {name} fails: {message} (margin {condition_margin:.3e}, tol {tol:.2e})",
                              hypothesis=name, margin=float(condition_margin))


def schwarz_check(u1, a1, u2, a2, g1_complete, full=False):
    """
    u2 <= u1 + ½ ln(a1/a2) pointwise, given g1 complete with K[g1] >= -a1
    and K[g2] <= -a2. Both hypotheses on curvature are verified on the
    check domain first.
    """
    if not a1 > 0 or not a2 > 0:
        raise ConfigError(f"Schwarz bounds need a1 > 0 and a2 > 0, got a1={a1}, a2={a2}")
    if u1.grid != u2.grid:
        raise UsageError(f"Schwarz check needs both metrics on one grid, got {u1.grid!r} and {u2.grid!r}")
    if not g1_complete:
        raise HypothesisError("hypothesis completeness fails: g1 is not declared complete",
                              hypothesis="completeness")
    grid = u1.grid
    mask, domain = check_mask(grid, full=full)

    K1 = gauss_curvature(u1).values
    slack = np.where(mask, K1 + a1 + node_tolerance(grid, K1, mask), np.inf)
    _hypothesis(float(np.min(slack)), 0.0, "K[g1] >= -a1", f"min K[g1]={np.min(K1[mask]):.6g} with a1={a1:g}")
    K2 = gauss_curvature(u2).values
    slack = np.where(mask, -a2 - K2 + node_tolerance(grid, K2, mask), np.inf)
    _hypothesis(float(np.min(slack)), 0.0, "K[g2] <= -a2", f"max K[g2]={np.max(K2[mask]):.6g} with a2={a2:g}")

    bound = u1.values + 0.5 * np.log(a1 / a2)
    worst = WorstCase("schwarz", domain, {"a1": float(a1), "a2": float(a2)})
    worst.add(None, grid, mask, bound - u2.values, node_tolerance(grid, u2.values, mask))
    return worst.report()


def _paired(first, second, what):
    if first.grid != second.grid:
        raise UsageError(f"{what} needs both trajectories on one grid, got {first.grid!r} and {second.grid!r}")
    times = common_times(first, second)
    if len(times) != len(first) or len(times) != len(second):
        raise UsageError(f"{what} needs matching snapshot times, got {list(first.times)} and {list(second.times)}")
    return times


def direct_comparison(traj_u, traj_v, full=False, atol=DIRECT_ATOL):
    """
    v >= u at every snapshot, given v(0) >= u(0) and ring data of v
    dominating that of u (the discrete stand-in for v blowing up at the rim).
    """
    times = _paired(traj_u, traj_v, "direct comparison")
    grid = traj_u.grid
    mask, domain = trajectory_mask(traj_u, full)

    u0, v0 = traj_u.initial.u.values, traj_v.initial.u.values
    gap = np.where(mask, v0 - u0 + atol + node_tolerance(grid, u0, mask), np.inf)
    if np.min(gap) < 0:
        r, theta = grid.location(int(np.argmin(gap)))
        raise PreconditionError(
            f"initial data are not ordered: v(0) < u(0) by {-(np.min(gap)):.3e} beyond tolerance at r={r:.4g}",
            location={"t": float(times[0]), "r": r, "theta": theta},
        )
    ring = grid.ring_mask
    for t, u, v in zip(times, traj_u.values, traj_v.values):
        deficit = np.min(v[ring] - u[ring])
        if deficit < -atol:
            raise PreconditionError(f"ring data of v fall below those of u at t={t:g} by {-deficit:.3e}",
                                    location={"t": float(t)})

    worst = WorstCase("direct comparison", domain, {"atol": atol})
    for t, u, v in zip(times, traj_u.values, traj_v.values):
        worst.add(t, grid, mask, v - u, atol + node_tolerance(grid, u, mask))
    return worst.report()


def _sup_hypothesis(traj, mask, quantity):
    """Worst (value - tol) of a per-snapshot quantity over the mask."""
    grid = traj.grid
    worst = -np.inf
    for state in traj:
        values = quantity(state)
        excess = np.where(mask, values - node_tolerance(grid, values, mask), -np.inf)
        worst = max(worst, float(np.max(excess)))
    return worst


def geometric_comparison(traj1, traj2, C, full=False):
    """
    Q = u1 - u2 <= 0 at every snapshot when (i) |K[g2]| <= C, (ii) K[g1] <= C,
    (iii) Q <= C, g2 passes the completeness proxy and Q(0) <= 0.
    """
    if C < 0:
        raise ConfigError(f"geometric comparison needs C >= 0, got {C}")
    times = _paired(traj1, traj2, "geometric comparison")
    grid = traj1.grid
    mask, domain = trajectory_mask(traj1, full)

    k2 = _sup_hypothesis(traj2, mask, lambda s: np.abs(gauss_curvature(s.u).values))
    _hypothesis(C - k2, 0.0, "(i)", f"sup |K[g2]| exceeds C={C:g}")
    k1 = _sup_hypothesis(traj1, mask, lambda s: gauss_curvature(s.u).values)
    _hypothesis(C - k1, 0.0, "(ii)", f"sup K[g1] exceeds C={C:g}")
    q = max(float(np.max((u1 - u2)[mask] - node_tolerance(grid, u1 - u2, mask)[mask]))
            for u1, u2 in zip(traj1.values, traj2.values))
    _hypothesis(C - q, 0.0, "(iii)", f"sup Q exceeds C={C:g}")

    proxy = completeness_proxy(traj2)
    if not proxy.passed:
        raise HypothesisError(f"hypothesis completeness fails for g2: {proxy.summary_line()}",
                              hypothesis="completeness", margin=proxy.margin)

    Q0 = traj1.values[0] - traj2.values[0]
    slack = np.where(mask, node_tolerance(grid, Q0, mask) - Q0, np.inf)
    if np.min(slack) < 0:
        r, theta = grid.location(int(np.argmin(slack)))
        raise PreconditionError(f"Q(0) = u1(0) - u2(0) > 0 beyond tolerance at r={r:.4g} (slack {np.min(slack):.3e})",
                                location={"t": float(times[0]), "r": r, "theta": theta})

    worst = WorstCase("geometric comparison", domain, {"C": float(C), "completeness": proxy.to_dict()})
    for t, u1, u2 in zip(times, traj1.values, traj2.values):
        Q = u1 - u2
        worst.add(t, grid, mask, -Q, node_tolerance(grid, Q, mask))
    return worst.report()


def uniqueness_experiment(u0, plan_a, plan_b, cfg=None):
    """
    Build the limit flow twice with different plans and compare them on the
    smaller of the two reference discs. Passes when the sup difference is
    below limit_tol_a + limit_tol_b + 10 h^2 (1 + |u|).
    """
    if plan_a == plan_b:
        logger.warning("uniqueness experiment with identical plans: the two paths coincide by construction")
    result_a = construct_limit(u0, plan_a, cfg)
    result_b = construct_limit(u0, plan_b, cfg)
    ref_a, ref_b = plan_a.reference_grid(), plan_b.reference_grid()
    grid = min((ref_a, ref_b), key=lambda g: (g.r_max, -g.n_r))
    radius = grid.r_max

    limit_a = result_a.limit.resample(grid)
    limit_b = result_b.limit.resample(grid)
    times = common_times(limit_a, limit_b)
    if not times:
        raise UsageError("the two constructions share no snapshot times")
    mask = grid.interior_mask
    budget = plan_a.limit_tol + plan_b.limit_tol
    worst = WorstCase("uniqueness (dual construction)", f"r <= {radius:.4g}",
                      {"limit_tol_a": plan_a.limit_tol, "limit_tol_b": plan_b.limit_tol})
    sup = 0.0
    for t in times:
        a, b = limit_a.at(t).values, limit_b.at(t).values
        diff = np.abs(a - b)
        sup = max(sup, float(np.max(diff[mask])))
        worst.add(t, grid, mask, -diff, budget + node_tolerance(grid, a, mask))
    worst.details["sup_difference"] = sup
    report = worst.report()
    logger.info("uniqueness: sup |u_A - u_B| = %.3e over %d snapshots", sup, len(times))
    return report


def uniqueness_chain(u_traj, v_traj, C, delta, full=False):
    """
    The uniqueness argument on recorded flows u (the limit) and v (another
    flow from the same data with K[v] <= C): build ṽ by the time shift, check
    |K[ṽ]| <= e^{-2Cδ} sup |K[v]|, the closed-form bound
    u - ṽ <= ½ ln(2T+1) - ½ ln(2δ), ṽ(0) >= u0, then compare u with ṽ.
    """
    if v_traj.grid != u_traj.grid:
        v_traj = v_traj.resample(u_traj.grid)
    T = float(u_traj.times[-1])
    times = [float(t) for t in u_traj.times if t <= T - delta + 1e-12]
    if len(times) < 2:
        raise UsageError(f"uniqueness chain needs >= 2 snapshots of u in [0, T - delta], got {times}")
    shifted = time_shift_transform(v_traj, C, delta, times=times, full=full)
    u_part = u_traj.select(times)
    grid = u_traj.grid
    mask, domain = trajectory_mask(u_traj, full)
    reports = _reports_of(shifted)

    scale = np.exp(-2.0 * C * delta)
    start = scale * delta
    window = [v_traj.sample(start)] + [s.u for s in v_traj if s.t > start]
    sup_v = max(float(np.max(np.abs(gauss_curvature(u).values[mask]))) for u in window)
    curvature = WorstCase("shifted flow curvature bound", domain, {"bound": scale * sup_v})
    for state in shifted:
        K = np.abs(gauss_curvature(state.u).values)
        curvature.add(state.t, grid, mask, scale * sup_v - K, node_tolerance(grid, K, mask))
    reports.append(curvature.report())

    q_bound = 0.5 * np.log(2.0 * T + 1.0) - 0.5 * np.log(2.0 * delta)
    q_check = WorstCase("Q upper bound", domain, {"bound": q_bound})
    for t, u, v in zip(times, u_part.values, shifted.values):
        q_check.add(t, grid, mask, q_bound - (u - v), node_tolerance(grid, u, mask))
    reports.append(q_check.report())

    C_geo = max(C, scale * sup_v, q_bound, 0.0)
    reports.append(geometric_comparison(u_part, shifted, C_geo, full=full))
    return reports


def _reports_of(traj):
    return [VerifierReport.from_dict(item) for item in traj.metadata.get("reports", [])]
