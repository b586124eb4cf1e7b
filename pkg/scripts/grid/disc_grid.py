"""
Polar grid on a disc of radius a, truncated at a(1 - collar).

Radii follow r_i = a (1 - collar) (1 - (1 - i/(n_r - 1))^clustering), so
r_0 = 0 is the center node and spacing shrinks toward the truncation ring.
A grid with n_theta = 1 is the radially symmetric fast path.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from scripts.common.errors import ConfigError
from scripts.grid.stencils import assemble_laplacian, assemble_ring_operator

MIN_N_R = 8
MIN_N_THETA = 8


@dataclass(frozen=True)
class DiscGrid:
    a: float
    n_r: int
    n_theta: int
    clustering: float = 1.5
    collar: float = 0.02

    def __post_init__(self):
        if not 0.0 < self.a <= 1.0:
            raise ConfigError(f"disc radius a must lie in (0, 1], got {self.a}")
        if int(self.n_r) != self.n_r or self.n_r < MIN_N_R:
            raise ConfigError(f"n_r must be an integer >= {MIN_N_R}, got {self.n_r}")
        if int(self.n_theta) != self.n_theta or not (self.n_theta == 1 or self.n_theta >= MIN_N_THETA):
            raise ConfigError(f"n_theta must be 1 (radial fast path) or >= {MIN_N_THETA}, got {self.n_theta}")
        if self.clustering < 1.0:
            raise ConfigError(f"clustering exponent must be >= 1, got {self.clustering}")
        if not 0.0 < self.collar < 0.5:
            raise ConfigError(f"collar must lie in (0, 0.5), got {self.collar}")
        object.__setattr__(self, "n_r", int(self.n_r))
        object.__setattr__(self, "n_theta", int(self.n_theta))
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "clustering", float(self.clustering))
        object.__setattr__(self, "collar", float(self.collar))

    # --- geometry -----------------------------------------------------------

    @property
    def r_max(self):
        """Truncation radius a (1 - collar)."""
        return self.a * (1.0 - self.collar)

    @property
    def radial(self):
        return self.n_theta == 1

    @property
    def n_nodes(self):
        return 1 + (self.n_r - 1) * self.n_theta

    @cached_property
    def radii(self):
        s = np.arange(self.n_r) / (self.n_r - 1)
        radii = self.r_max * (1.0 - (1.0 - s) ** self.clustering)
        radii[0] = 0.0
        radii[-1] = self.r_max
        radii.setflags(write=False)
        return radii

    @cached_property
    def angles(self):
        angles = 2.0 * np.pi * np.arange(self.n_theta) / self.n_theta
        angles.setflags(write=False)
        return angles

    @cached_property
    def node_r(self):
        values = np.concatenate([[0.0], np.repeat(self.radii[1:], self.n_theta)])
        values.setflags(write=False)
        return values

    @cached_property
    def node_theta(self):
        values = np.concatenate([[0.0], np.tile(self.angles, self.n_r - 1)])
        values.setflags(write=False)
        return values

    @property
    def x(self):
        return self.node_r * np.cos(self.node_theta)

    @property
    def y(self):
        return self.node_r * np.sin(self.node_theta)

    @cached_property
    def radial_spacing(self):
        return np.diff(self.radii)

    def node_index(self, i, j=0):
        """Flat index of ring i, angle j (ring 0 is the center)."""
        return 0 if i == 0 else 1 + (i - 1) * self.n_theta + j

    def location(self, index):
        """(r, theta) of a flat node index."""
        return float(self.node_r[index]), float(self.node_theta[index])

    # --- masks --------------------------------------------------------------

    @cached_property
    def ring_mask(self):
        mask = np.zeros(self.n_nodes, dtype=bool)
        mask[self.node_index(self.n_r - 1):] = True
        mask.setflags(write=False)
        return mask

    @property
    def interior_mask(self):
        return ~self.ring_mask

    def check_mask(self, fraction=0.8, full=False):
        """Interior nodes with r <= fraction * r_max, or every interior node in full-domain mode."""
        if full:
            return self.interior_mask
        return self.interior_mask & (self.node_r <= fraction * self.r_max + 1e-14)

    def check_spacing(self, radius):
        """Largest radial spacing among the cells touching nodes with r <= radius."""
        inside = np.searchsorted(self.radii, radius + 1e-14, side="right")
        last = min(max(inside + 1, 2), self.n_r)
        return float(np.max(np.diff(self.radii[:last])))

    # --- operators ----------------------------------------------------------

    @cached_property
    def laplacian_matrix(self):
        return assemble_laplacian(np.asarray(self.radii), self.n_theta)

    @cached_property
    def ring_matrix(self):
        return assemble_ring_operator(np.asarray(self.radii), self.n_theta)

    # --- layout helpers -----------------------------------------------------

    def as_rings(self, values):
        """Reshape node values to (n_r, n_theta), replicating the center across row 0."""
        rings = np.empty((self.n_r, self.n_theta))
        rings[0, :] = values[0]
        rings[1:, :] = np.asarray(values[1:]).reshape(self.n_r - 1, self.n_theta)
        return rings

    def from_rings(self, rings):
        return np.concatenate([[rings[0, 0]], np.asarray(rings[1:]).ravel()])

    def header(self):
        return {
            "a": self.a,
            "n_r": self.n_r,
            "n_theta": self.n_theta,
            "clustering": self.clustering,
            "collar": self.collar,
        }

    def with_radius(self, a):
        return DiscGrid(a, self.n_r, self.n_theta, self.clustering, self.collar)

    def __repr__(self):
        return (f"DiscGrid(a={self.a:g}, n_r={self.n_r}, n_theta={self.n_theta}, "
                f"clustering={self.clustering:g}, collar={self.collar:g})")


def build_grid(a, n_r, n_theta, clustering=1.5, collar=0.02):
    """Build a validated polar grid; parameter-domain violations raise ConfigError."""
    return DiscGrid(a=a, n_r=n_r, n_theta=n_theta, clustering=clustering, collar=collar)


def grid_with_truncation(radius, n_r, n_theta, clustering=1.0, collar=0.02):
    """Grid whose truncation ring sits exactly at the given radius."""
    return DiscGrid(a=radius / (1.0 - collar), n_r=n_r, n_theta=n_theta,
                    clustering=clustering, collar=collar)


def grid_from_header(header):
    return DiscGrid(
        a=float(header["a"]),
        n_r=int(header["n_r"]),
        n_theta=int(header["n_theta"]),
        clustering=float(header["clustering"]),
        collar=float(header["collar"]),
    )
