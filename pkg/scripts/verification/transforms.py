"""
Time reparametrisations of a recorded flow.

    time shift        ṽ(t) = v(e^{-2Cδ}(t + δ)) + Cδ        again a flow
    supersolution     v_ε(t) = v(ln(εt + 1)/ε) + ½ ln(εt + 1)
                      (∂_t - e^{-2v_ε}Δ) v_ε = ε / (2(εt + 1))

Both evaluate v between snapshots with the trajectory's cubic time
interpolant, so the source needs at least four snapshots. Residuals are
measured with the discrete Laplacian and compared with
tol = factor * (h^2 + Δt^2) * (1 + |rhs|), Δt the largest snapshot gap.
"""

import logging

import numpy as np

from scripts.common.errors import ConfigError, UsageError
from scripts.grid.fields import ScalarField
from scripts.flow.trajectory import MIN_SPLINE_SNAPSHOTS, FlowState, Trajectory
from scripts.verification.report import WorstCase, node_tolerance, trajectory_mask

import disc_config

logger = logging.getLogger(__name__)


def _require_interpolant(traj, what):
    if len(traj) < MIN_SPLINE_SNAPSHOTS:
        raise UsageError(
            f"{what} needs >= {MIN_SPLINE_SNAPSHOTS} snapshots for cubic time interpolation, got {len(traj)}"
        )


def _residual_tolerance(grid, values, mask, dt_gap, factor=None):
    factor = disc_config.TOLERANCE_FACTOR if factor is None else factor
    return node_tolerance(grid, values, mask, factor) + factor * dt_gap ** 2 * (1.0 + np.abs(values))


def _source_time(traj, s, what):
    lo, hi = traj.times[0], traj.times[-1]
    slack = 1e-12 * max(1.0, abs(hi))
    if s < lo - slack or s > hi + slack:
        raise UsageError(f"{what} needs v at t={s:.6g}, outside the recorded interval [{lo:g}, {hi:g}]")
    return min(max(s, lo), hi)


def _flow_rhs(grid, values):
    out = np.exp(-2.0 * values) * (grid.laplacian_matrix @ values)
    out[grid.ring_mask] = 0.0
    return out


def supersolution_residual(eps, t):
    """ε / (2(εt + 1)), the exact defect of v_ε."""
    return eps / (2.0 * (eps * t + 1.0))


def time_shift_transform(traj, C, delta, times=None, full=False):
    """
    ṽ(t) = v(e^{-2Cδ}(t + δ)) + Cδ on [0, T - δ].

    Default output times are t = 0 plus the times whose source time is a
    recorded snapshot. The residual report and the lower-bound report
    ṽ(0) >= v(0) - tol are stored as dicts in metadata['reports'].
    """
    _require_interpolant(traj, "time shift")
    if C < 0:
        raise ConfigError(f"time shift needs a curvature bound C >= 0, got {C}")
    T = float(traj.times[-1])
    if not 0.0 < delta < T:
        raise ConfigError(f"time shift needs 0 < delta < T={T:g}, got {delta}")

    scale = np.exp(-2.0 * C * delta)
    if times is None:
        knots = [float(tau / scale - delta) for tau in traj.times]
        times = [0.0] + [t for t in knots if 0.0 < t <= T - delta]
    times = sorted(float(t) for t in times)

    grid = traj.grid
    mask, domain = trajectory_mask(traj, full)
    dt_gap = float(np.max(np.diff(traj.times)))
    residual = WorstCase("time shift: flow residual", domain, {"C": C, "delta": delta})
    states = []
    for t in times:
        s = _source_time(traj, scale * (t + delta), "time shift")
        values = traj.sample(s).values + C * delta
        rate = scale * traj.time_derivative(s).values
        rhs = _flow_rhs(grid, values)
        residual.add(t, grid, mask, -np.abs(rate - rhs), _residual_tolerance(grid, rhs, mask, dt_gap))
        states.append(FlowState(t, ScalarField(grid, values)))

    start = states[0].u.values
    base = traj.initial.u.values
    lower = WorstCase("time shift: initial lower bound", domain, {"C": C, "delta": delta})
    lower.add(times[0], grid, mask, start - base, node_tolerance(grid, base, mask))

    reports = [residual.report(), lower.report()]
    for report in reports:
        logger.info(report.summary_line())
    metadata = {"transform": "time_shift", "C": float(C), "delta": float(delta),
                "reports": [r.to_dict() for r in reports]}
    merged = dict(traj.metadata)
    merged.update(metadata)
    return Trajectory(states, metadata=merged)


def supersolution_transform(traj, eps, times=None, full=False):
    """
    v_ε(t) = v(ln(εt + 1)/ε) + ½ ln(εt + 1) with its measured residual
    compared against ε/(2(εt + 1)). Default output times map onto the
    recorded snapshots. Returns (trajectory, report).
    """
    _require_interpolant(traj, "supersolution transform")
    if not eps > 0:
        raise ConfigError(f"supersolution transform needs eps > 0, got {eps}")
    if times is None:
        times = [float(np.expm1(eps * tau) / eps) for tau in traj.times]
    times = sorted(float(t) for t in times)

    grid = traj.grid
    mask, domain = trajectory_mask(traj, full)
    dt_gap = float(np.max(np.diff(traj.times)))
    worst = WorstCase("supersolution residual", domain, {"eps": float(eps)})
    states = []
    for t in times:
        growth = eps * t + 1.0
        s = _source_time(traj, np.log1p(eps * t) / eps, "supersolution transform")
        values = traj.sample(s).values + 0.5 * np.log(growth)
        rate = traj.time_derivative(s).values / growth + eps / (2.0 * growth)
        measured = rate - _flow_rhs(grid, values)
        analytic = supersolution_residual(eps, t)
        worst.add(t, grid, mask, -np.abs(measured - analytic),
                  _residual_tolerance(grid, np.full(grid.n_nodes, analytic), mask, dt_gap))
        states.append(FlowState(t, ScalarField(grid, values)))

    report = worst.report()
    logger.info(report.summary_line())
    merged = dict(traj.metadata)
    merged.update({"transform": "supersolution", "eps": float(eps), "reports": [report.to_dict()]})
    return Trajectory(states, metadata=merged), report
