"""
Curvature and barrier checks on trajectories.

All checks run on the trajectory's check domain (interior nodes with
r <= fraction * truncation radius) unless full=True, and report the node
most violated relative to its tolerance.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from scripts.common.errors import DomainError, UsageError
from scripts.grid.fields import ScalarField, resample
from scripts.metrics.conformal import ConformalMetric, bigbang_factor, expanding_hyperbolic, gauss_curvature
from scripts.metrics.initial_data import restrict_metric
from scripts.verification.report import VerifierReport, WorstCase, node_tolerance, trajectory_mask

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdmissibilityParams:
    C: float
    C_eps: dict = field(default_factory=dict)

    def lower_bound(self, eps):
        """-C_eps: the measured lower curvature bound on [eps, T]."""
        if eps not in self.C_eps:
            raise DomainError(f"C_eps was not measured for eps={eps:g}; known: {sorted(self.C_eps)}")
        return -self.C_eps[eps]


def _curvatures(traj):
    return [gauss_curvature(state.u).values for state in traj]


def _positive_times(traj, what):
    if not np.any(traj.times > 0):
        raise UsageError(f"{what} needs snapshots with t > 0, trajectory has times {list(traj.times)}")


def barrier_fields(grid, t):
    """Lower (big-bang) and upper (expanding) barriers ln 2/(1-|x|^2) + ½ ln(2t) and + ½ ln(2t+1)."""
    lower = bigbang_factor(grid, t).values if t > 0 else np.full(grid.n_nodes, -np.inf)
    upper = expanding_hyperbolic(grid, 1.0, t).values
    return lower, upper


def completeness_proxy(traj):
    """
    Big-bang ring dominance: u >= ln 2/(1-|x|^2) + ½ ln(2t) on the last two
    rings at every t > 0. Stands in for completeness, which a sampled
    metric cannot certify.
    """
    _positive_times(traj, "completeness proxy")
    grid = traj.grid
    near_ring = grid.node_r >= grid.radii[-2] - 1e-14
    worst = WorstCase("completeness proxy (big-bang ring dominance)", "last two rings",
                      {"proxy": "u >= big-bang barrier near the truncation ring"})
    for state in traj:
        if state.t <= 0:
            continue
        bigbang = bigbang_factor(grid, state.t).values
        worst.add(state.t, grid, near_ring, state.u.values - bigbang, node_tolerance(grid, bigbang, near_ring))
    return worst.report()


def admissibility_report(traj, eps_list, full=False):
    """
    Measure C = max K over all snapshots and C_eps = -min K over t >= eps.

    The returned report is the completeness proxy; C and C_eps go into its details.
    """
    _positive_times(traj, "admissibility")
    mask, _ = trajectory_mask(traj, full)
    curvatures = _curvatures(traj)
    C = float(max(np.max(K[mask]) for K in curvatures))
    C_eps = {}
    for eps in eps_list:
        if not eps > 0:
            raise DomainError(f"eps must be > 0, got {eps}")
        later = [K for K, t in zip(curvatures, traj.times) if t >= eps]
        if not later:
            raise UsageError(f"no snapshot at or after eps={eps:g} (last time {traj.times[-1]:g})")
        C_eps[float(eps)] = float(-min(np.min(K[mask]) for K in later))
    params = AdmissibilityParams(C, C_eps)

    proxy = completeness_proxy(traj)
    details = dict(proxy.details)
    details.update({"C": C, "C_eps": {f"{eps:g}": value for eps, value in C_eps.items()}})
    logger.info("admissibility: C=%.6g, C_eps=%s, completeness proxy %s",
                C, C_eps, "holds" if proxy.passed else "fails")
    return params, VerifierReport("admissibility", proxy.margin, proxy.tolerance, proxy.location,
                                  proxy.domain, details)


def _initial_field(traj, u0):
    grid = traj.grid
    if u0 is None:
        return traj.initial.u.values
    if isinstance(u0, ConformalMetric):
        return restrict_metric(u0, grid).u.values
    if isinstance(u0, ScalarField):
        return (u0 if u0.grid == grid else resample(u0, grid)).values
    return np.broadcast_to(np.asarray(u0, dtype=float), (grid.n_nodes,))


def barrier_report(traj, u0=None, C_upper=None, full=False):
    """
    The four a priori barriers for a flow from data with K <= -1:

    (A) K >= -1/(2t)                                    t > 0
    (B) u >= ln 2/(1-|x|^2) + ½ ln(2t)                  t > 0
    (C) u <= ln 2/(1-|x|^2) + ½ ln(2t+1)                t >= 0
    (D) u >= u0 - C t                                   t >= 0

    u0 defaults to the first snapshot and C_upper to the measured max K;
    (D) counts time from the first snapshot.
    """
    grid = traj.grid
    mask, domain = trajectory_mask(traj, full)
    curvatures = _curvatures(traj)
    if C_upper is None:
        C_upper = float(max(np.max(K[mask]) for K in curvatures))
    base = _initial_field(traj, u0)
    t0 = traj.times[0]

    checks = {
        "A": WorstCase("barrier (A) K >= -1/(2t)", domain),
        "B": WorstCase("barrier (B) u >= big-bang", domain),
        "C": WorstCase("barrier (C) u <= expanding hyperbolic", domain),
        "D": WorstCase("barrier (D) u >= u0 - C t", domain, {"C": float(C_upper)}),
    }
    for state, K in zip(traj, curvatures):
        t, u = state.t, state.u.values
        lower, upper = barrier_fields(grid, t)
        if t > 0:
            bound = -1.0 / (2.0 * t)
            checks["A"].add(t, grid, mask, K - bound, node_tolerance(grid, K, mask))
            checks["B"].add(t, grid, mask, u - lower, node_tolerance(grid, lower, mask))
        checks["C"].add(t, grid, mask, upper - u, node_tolerance(grid, upper, mask))
        floor = base - C_upper * (t - t0)
        checks["D"].add(t, grid, mask, u - floor, node_tolerance(grid, floor, mask))

    reports = [checks[key].report() for key in ("A", "B") if not checks[key].empty]
    if len(reports) < 2:
        logger.warning("barriers (A) and (B) skipped: no snapshot with t > 0")
    return reports + [checks["C"].report(), checks["D"].report()]


def curvature_sandwich(traj, full=False):
    """-1/(2t) <= K <= -1/(2t+1) at every snapshot t > 0; the reported side is the worse one."""
    _positive_times(traj, "curvature sandwich")
    grid = traj.grid
    mask, domain = trajectory_mask(traj, full)
    lower = WorstCase("curvature sandwich (lower)", domain)
    upper = WorstCase("curvature sandwich (upper)", domain)
    for state in traj:
        t = state.t
        if t <= 0:
            continue
        K = gauss_curvature(state.u).values
        tol = node_tolerance(grid, K, mask)
        lower.add(t, grid, mask, K + 1.0 / (2.0 * t), tol)
        upper.add(t, grid, mask, -1.0 / (2.0 * t + 1.0) - K, tol)
    low, high = lower.report(), upper.report()
    worst, side = (low, "lower") if low.margin + low.tolerance <= high.margin + high.tolerance else (high, "upper")
    details = {"side": side, "lower_margin": low.margin, "upper_margin": high.margin}
    return VerifierReport("curvature sandwich", worst.margin, worst.tolerance, worst.location, domain, details)


def approximate_flow_bounds(traj, eta, full=False):
    """
    Bounds for an approximating flow from a smoothed maximum with cutoff width eta:
    K <= -1/(2t + e^{2 eta}) for t >= 0 and K >= -1/(2t) for t > 0.
    Returns [upper, lower].
    """
    grid = traj.grid
    mask, domain = trajectory_mask(traj, full)
    upper = WorstCase("approximate flow upper bound K <= -1/(2t + e^(2 eta))", domain, {"eta": eta})
    lower = WorstCase("approximate flow lower bound K >= -1/(2t)", domain, {"eta": eta})
    for state in traj:
        t = state.t
        K = gauss_curvature(state.u).values
        tol = node_tolerance(grid, K, mask)
        upper.add(t, grid, mask, -1.0 / (2.0 * t + np.exp(2.0 * eta)) - K, tol)
        if t > 0:
            lower.add(t, grid, mask, K + 1.0 / (2.0 * t), tol)
    reports = [upper.report()]
    if not lower.empty:
        reports.append(lower.report())
    return reports


def ode_curvature_bound(traj, eps, full=False):
    """
    K(t) >= -1/(2(t - eps) + 1/C_eps) for t >= eps, with C_eps = -min K at
    the snapshot t = eps.
    """
    index = traj.index_of(eps)
    if index is None:
        raise UsageError(f"ODE curvature bound needs a snapshot at eps={eps:g}")
    grid = traj.grid
    mask, domain = trajectory_mask(traj, full)
    C_eps = float(-np.min(gauss_curvature(traj[index].u).values[mask]))
    if C_eps <= 0:
        raise DomainError(f"ODE curvature bound needs negative curvature at eps={eps:g}, measured C_eps={C_eps:g}")
    worst = WorstCase("ODE curvature lower bound", domain, {"eps": float(eps), "C_eps": C_eps})
    for state in traj.snapshots[index:]:
        K = gauss_curvature(state.u).values
        bound = -1.0 / (2.0 * (state.t - eps) + 1.0 / C_eps)
        worst.add(state.t, grid, mask, K - bound, node_tolerance(grid, K, mask))
    return worst.report()
