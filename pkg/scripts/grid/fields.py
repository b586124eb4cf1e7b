"""
Scalar fields on a DiscGrid and the pure operations on them.

Fields are immutable: the value array is copied on construction and
marked read-only. Non-finite values are rejected so that blow-up is
always caught by the solver, never stored.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from scripts.common.errors import ConfigError, DomainError, UsageError
from scripts.grid.disc_grid import DiscGrid


@dataclass(frozen=True, eq=False)
class ScalarField:
    grid: DiscGrid
    values: np.ndarray
    ring_trusted: bool = True

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (self.grid.n_nodes,):
            raise UsageError(
                f"field has shape {values.shape}, grid {self.grid!r} needs ({self.grid.n_nodes},)"
            )
        bad = ~np.isfinite(values)
        if bad.any():
            index = int(np.argmax(bad))
            r, theta = self.grid.location(index)
            raise DomainError(f"non-finite field value at node {index} (r={r:.6g}, theta={theta:.6g})")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, grid, fn):
        """Evaluate fn(r, theta) at every node."""
        return cls(grid, np.broadcast_to(fn(grid.node_r, grid.node_theta), (grid.n_nodes,)))

    @classmethod
    def constant(cls, grid, value):
        return cls(grid, np.full(grid.n_nodes, float(value)))

    def ring_values(self):
        return self.values[self.grid.ring_mask]

    def as_rings(self):
        return self.grid.as_rings(self.values)

    def _operand(self, other):
        if isinstance(other, ScalarField):
            if other.grid != self.grid:
                raise UsageError(f"fields live on different grids: {self.grid!r} vs {other.grid!r}")
            return other.values
        return float(other)

    def __add__(self, other):
        return ScalarField(self.grid, self.values + self._operand(other))

    __radd__ = __add__

    def __sub__(self, other):
        return ScalarField(self.grid, self.values - self._operand(other))

    def __rsub__(self, other):
        return ScalarField(self.grid, self._operand(other) - self.values)

    def __mul__(self, other):
        return ScalarField(self.grid, self.values * self._operand(other))

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField(self.grid, -self.values)

    def map(self, fn):
        return ScalarField(self.grid, fn(self.values))

    def equals(self, other):
        """Bitwise equality of grid and values."""
        return self.grid == other.grid and np.array_equal(self.values, other.values)


def laplacian(f):
    """Flat Laplacian at the center and interior rings; truncation-ring entries are zero."""
    return ScalarField(f.grid, f.grid.laplacian_matrix @ f.values)


def laplacian_with_ring(f):
    """Flat Laplacian including the lower-order one-sided value at the truncation ring."""
    grid = f.grid
    values = grid.laplacian_matrix @ f.values + grid.ring_matrix @ f.values
    return ScalarField(grid, values, ring_trusted=False)


def resample(f, target):
    """
    Interpolate f onto another grid: cubic spline along each source ray,
    then a periodic cubic spline in angle. Identity on identical grids.
    """
    if target == f.grid:
        return f
    source = f.grid
    if target.r_max > source.r_max * (1.0 + 1e-12):
        raise DomainError(
            f"target truncation radius {target.r_max:.6g} exceeds source radius {source.r_max:.6g}"
        )
    radial = CubicSpline(source.radii, f.as_rings(), axis=0)(target.radii)
    if source.n_theta == 1:
        rings = np.repeat(radial, target.n_theta, axis=1)
    else:
        angles = np.append(source.angles, 2.0 * np.pi)
        periodic = np.concatenate([radial, radial[:, :1]], axis=1)
        rings = CubicSpline(angles, periodic, axis=1, bc_type="periodic")(target.angles)
    return ScalarField(target, target.from_rings(rings))


REDUCTIONS = ("min", "max", "sup-norm")


def field_reduce(f, kind, mask=None):
    """Exact min, max or sup-norm over the nodes (optionally restricted by a mask)."""
    values = f.values if mask is None else f.values[mask]
    if values.size == 0:
        raise UsageError("reduction over an empty node set")
    if kind == "min":
        return float(np.min(values))
    if kind == "max":
        return float(np.max(values))
    if kind in ("sup-norm", "sup"):
        return float(np.max(np.abs(values)))
    raise ConfigError(f"unknown reduction '{kind}', expected one of {REDUCTIONS}")
