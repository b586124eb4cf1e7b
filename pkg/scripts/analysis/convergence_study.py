"""
Grid-refinement study on the expanding hyperbolic flow.

The solver is started from expanding_hyperbolic(a=1, t=0) with the
constant-curvature ring policy and compared with the closed form at T on
the check domain. The order is the least-squares slope of log(error)
against log(h), fitted with statsmodels so that it comes with a
confidence interval.
"""

import logging

import numpy as np
import pandas as pd
import statsmodels.api as sm

from scripts.common.errors import UsageError
from scripts.grid.disc_grid import build_grid
from scripts.metrics.initial_data import initial_metric
from scripts.metrics.conformal import expanding_hyperbolic
from scripts.flow.schedule import BoundaryPolicy, FlowConfig
from scripts.flow.solver import run
from scripts.verification.report import check_mask

import disc_config

logger = logging.getLogger(__name__)

LADDER_COLUMNS = ["n_r", "h", "error", "steps"]


def convergence_order(hs, errors, alpha=0.05):
    """Slope of log(error) on log(h) and its (1 - alpha) confidence interval."""
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if hs.shape != errors.shape or hs.size < 2:
        raise UsageError(f"convergence order needs >= 2 matching (h, error) pairs, got {hs.size} and {errors.size}")
    if np.any(hs <= 0) or np.any(errors <= 0):
        raise UsageError("convergence order needs positive spacings and errors")

    X = sm.add_constant(np.log(hs))
    model = sm.OLS(np.log(errors), X).fit()
    order = float(model.params[1])
    if hs.size > 2:
        low, high = model.conf_int(alpha=alpha)[1]
        conf_int = (float(low), float(high))
    else:
        # two points fit exactly, no residual degrees of freedom
        conf_int = (order, order)
    return order, conf_int


def exact_solution_error(n_r, T, cfg=None, n_theta=1, clustering=disc_config.DEFAULT_CLUSTERING,
                         collar=disc_config.DEFAULT_COLLAR):
    """L∞ error against the closed form at T on the check domain, with the spacing h used there."""
    grid = build_grid(a=1.0, n_r=n_r, n_theta=n_theta, clustering=clustering, collar=collar)
    cfg = cfg or FlowConfig(snapshot_times=(0.0, T))
    traj = run(initial_metric("expanding-hyperbolic", grid), BoundaryPolicy("constant-curvature"), T, cfg)
    mask, _ = check_mask(grid)
    exact = expanding_hyperbolic(grid, 1.0, T).values
    error = float(np.max(np.abs(traj.final.u.values - exact)[mask]))
    h = grid.check_spacing(disc_config.CHECK_FRACTION * grid.r_max)
    return error, h, len(traj.diagnostics)


def exact_solution_ladder(n_r_list, T=disc_config.DEFAULT_HORIZON, cfg=None, **grid_kwargs):
    """One row per resolution; the fitted order is attached as frame.attrs['order'] / ['conf_int']."""
    rows = []
    for n_r in n_r_list:
        error, h, steps = exact_solution_error(n_r, T, cfg, **grid_kwargs)
        logger.info("ladder n_r=%d: h=%.4g error=%.3e (%d steps)", n_r, h, error, steps)
        rows.append((n_r, h, error, steps))
    frame = pd.DataFrame(rows, columns=LADDER_COLUMNS)
    if len(frame) >= 2:
        order, conf_int = convergence_order(frame["h"], frame["error"])
        frame.attrs["order"] = order
        frame.attrs["conf_int"] = conf_int
        logger.info("measured convergence order %.3f (CI %.3f..%.3f)", order, *conf_int)
    return frame
