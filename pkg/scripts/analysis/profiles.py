"""
Plot-ready tables of a trajectory.

radial_profiles     long table: one row per (t, node) with r, theta, u, K
profile_columns     wide table along theta = 0: r, then u@t and K@t columns
time_series         one row per snapshot: extremes of u and K on the
                    check domain plus the metric distance to the ring
"""

import numpy as np
import pandas as pd

from scripts.common.errors import UsageError
from scripts.metrics.conformal import ConformalMetric, gauss_curvature, radial_distance
from scripts.verification.report import trajectory_mask

SERIES_COLUMNS = ["t", "min_u", "max_u", "min_K", "max_K", "radial_distance"]


def _selected(traj, times):
    if len(traj) == 0:
        raise UsageError("cannot export an empty trajectory")
    if times is None:
        return list(traj)
    missing = [float(t) for t in times if traj.index_of(t) is None]
    if missing:
        raise UsageError(f"times {missing} are not recorded; available: {[float(t) for t in traj.times]}")
    return [traj[traj.index_of(t)] for t in times]


def radial_profiles(traj, times=None):
    frames = []
    for state in _selected(traj, times):
        grid = state.u.grid
        frames.append(pd.DataFrame({
            "t": state.t,
            "r": grid.node_r,
            "theta": grid.node_theta,
            "u": state.u.values,
            "K": gauss_curvature(state.u).values,
        }))
    return pd.concat(frames, ignore_index=True)


def _ray(grid):
    return [grid.node_index(i, 0) for i in range(grid.n_r)]


def profile_columns(traj, times=None):
    """u and K along the theta = 0 ray, one column pair per snapshot."""
    states = _selected(traj, times)
    grid = states[0].u.grid
    ray = _ray(grid)
    columns = {"r": grid.node_r[ray]}
    for state in states:
        columns[f"u@{state.t:.17g}"] = state.u.values[ray]
        columns[f"K@{state.t:.17g}"] = gauss_curvature(state.u).values[ray]
    return pd.DataFrame(columns)


def time_series(traj):
    states = _selected(traj, None)
    mask, _ = trajectory_mask(traj)
    rows = []
    for state in states:
        u = state.u.values[mask]
        K = gauss_curvature(state.u).values[mask]
        rows.append((state.t, float(np.min(u)), float(np.max(u)), float(np.min(K)), float(np.max(K)),
                     radial_distance(ConformalMetric(state.u))))
    return pd.DataFrame(rows, columns=SERIES_COLUMNS)
