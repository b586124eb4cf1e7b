"""
Conformal factors on disc grids and their Gauss curvature.

A metric is stored as its log conformal factor u, g = e^{2u}|dz|^2, and
K = -e^{-2u} Δu with Δ the flat Laplacian.
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from scripts.common.errors import DomainError, PreconditionError
from scripts.grid.fields import ScalarField, laplacian_with_ring

import disc_config


@dataclass(frozen=True, eq=False)
class ConformalMetric:
    u: ScalarField
    complete: Optional[bool] = None
    descriptor: Optional[str] = None
    # exact |K| at the truncation ring when the family is known in closed form
    ring_curvature: Optional[float] = None

    @property
    def grid(self):
        return self.u.grid

    def with_field(self, u):
        return replace(self, u=u)


def hyperbolic_factor(grid, a, c):
    """u = ln(2a / (sqrt(c) (a^2 - |x|^2))): complete metric of curvature -c on the disc of radius a."""
    if a <= 0 or c <= 0:
        raise DomainError(f"hyperbolic factor needs a > 0 and c > 0, got a={a}, c={c}")
    if grid.r_max >= a:
        raise DomainError(f"grid truncation radius {grid.r_max:.6g} must stay inside the disc of radius {a:.6g}")
    r = grid.node_r
    return ScalarField(grid, np.log(2.0 * a / (np.sqrt(c) * (a * a - r * r))))


def bigbang_factor(grid, t):
    """ln(2/(1 - |x|^2)) + ½ ln(2t): constant curvature -1/(2t), emerging from the zero metric."""
    if t <= 0:
        raise DomainError(f"big-bang factor is defined for t > 0 only, got t={t}")
    return hyperbolic_factor(grid, 1.0, 1.0 / (2.0 * t))


def expanding_hyperbolic(grid, a, t):
    """ln(2a/(a^2 - |x|^2)) + ½ ln(2t + 1): exact flow with K = -1/(2t + 1) on the disc of radius a."""
    if t < 0:
        raise DomainError(f"expanding hyperbolic flow starts at t = 0, got t={t}")
    return hyperbolic_factor(grid, a, 1.0 / (2.0 * t + 1.0))


def gauss_curvature(m):
    """
    K = -e^{-2u} Δu at every node.

    Truncation-ring entries come from one-sided stencils; the returned
    field is flagged with ring_trusted=False.
    """
    u = m.u if isinstance(m, ConformalMetric) else m
    lap = laplacian_with_ring(u)
    return ScalarField(u.grid, -np.exp(-2.0 * u.values) * lap.values, ring_trusted=False)


def curvature_tolerance(grid, curvature, mask, factor=None):
    """Per-node tolerance factor * h^2 * (1 + |K|) with h the largest radial spacing on the mask."""
    factor = disc_config.TOLERANCE_FACTOR if factor is None else factor
    radius = float(np.max(grid.node_r[mask])) if mask.any() else 0.0
    h = grid.check_spacing(radius)
    return factor * h * h * (1.0 + np.abs(curvature))


def require_curvature_below(m, bound=-1.0, fraction=None, factor=None, what="initial metric"):
    """
    Raise PreconditionError unless K <= bound + tol on the check domain.

    The check domain stops at fraction * truncation radius: one-sided and
    rim-clustered stencils are only first order next to the ring.
    """
    fraction = disc_config.CHECK_FRACTION if fraction is None else fraction
    grid = m.grid
    mask = grid.check_mask(fraction)
    K = gauss_curvature(m).values
    tol = curvature_tolerance(grid, K, mask, factor)
    excess = np.where(mask, K - bound - tol, -np.inf)
    worst = int(np.argmax(excess))
    if excess[worst] > 0:
        r, theta = grid.location(worst)
        raise PreconditionError(
            f"{what} violates K <= {bound:g}: K={K[worst]:.6g} at r={r:.6g}, theta={theta:.6g} "
            f"(tolerance {tol[worst]:.3g})",
            location={"r": r, "theta": theta, "K": float(K[worst])},
        )
    return float(np.max(K[mask]))


def radial_distance(m):
    """Metric length from the center to the truncation ring along theta = 0."""
    grid = m.grid
    idx = [grid.node_index(i, 0) for i in range(grid.n_r)]
    return float(trapezoid(np.exp(m.u.values[idx]), grid.radii))
