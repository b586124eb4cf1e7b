"""
Flow states and trajectories.

A Trajectory is an ordered, immutable list of snapshots on one grid plus
the configuration and boundary policy that produced it, the per-step
diagnostics table and free-form metadata (k index, exact-solution name,
transform parameters, ...).
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import pandas as pd
from scipy.interpolate import CubicSpline

from scripts.common.errors import DomainError, UsageError
from scripts.grid.fields import ScalarField, resample
from scripts.flow.schedule import FlowConfig, exact_field, exact_policy

DIAGNOSTIC_COLUMNS = ["t", "dt", "min_u", "max_u", "min_K", "max_K"]
MIN_SPLINE_SNAPSHOTS = 4


@dataclass(frozen=True)
class FlowState:
    t: float
    u: ScalarField

    def __post_init__(self):
        if not np.isfinite(self.t) or self.t < 0:
            raise DomainError(f"flow time must be finite and >= 0, got {self.t}")
        object.__setattr__(self, "t", float(self.t))


class Trajectory:
    def __init__(self, snapshots, config=None, policy=None, diagnostics=None, metadata=None):
        snapshots = list(snapshots)
        if snapshots:
            grid = snapshots[0].u.grid
            for state in snapshots[1:]:
                if state.u.grid != grid:
                    raise UsageError(f"snapshot at t={state.t:g} lives on {state.u.grid!r}, expected {grid!r}")
            times = [s.t for s in snapshots]
            if any(b <= a for a, b in zip(times, times[1:])):
                raise UsageError(f"snapshot times must be strictly increasing, got {times}")
        self._snapshots = tuple(snapshots)
        self.config = config if config is not None else FlowConfig(snapshot_times=[s.t for s in snapshots])
        self.policy = policy
        self.diagnostics = diagnostics if diagnostics is not None else pd.DataFrame(columns=DIAGNOSTIC_COLUMNS)
        self.metadata = dict(metadata or {})

    def __len__(self):
        return len(self._snapshots)

    def __iter__(self):
        return iter(self._snapshots)

    def __getitem__(self, index):
        return self._snapshots[index]

    def __repr__(self):
        if not self._snapshots:
            return "Trajectory(empty)"
        return (f"Trajectory({len(self)} snapshots on [{self.times[0]:g}, {self.times[-1]:g}], "
                f"grid={self.grid!r})")

    @property
    def snapshots(self):
        return self._snapshots

    def _require_snapshots(self):
        if not self._snapshots:
            raise UsageError("trajectory has no snapshots")

    @property
    def grid(self):
        self._require_snapshots()
        return self._snapshots[0].u.grid

    @cached_property
    def times(self):
        times = np.array([s.t for s in self._snapshots])
        times.setflags(write=False)
        return times

    @cached_property
    def values(self):
        """Snapshot values as an (n_snapshots, n_nodes) array."""
        self._require_snapshots()
        values = np.stack([s.u.values for s in self._snapshots])
        values.setflags(write=False)
        return values

    @property
    def initial(self):
        self._require_snapshots()
        return self._snapshots[0]

    @property
    def final(self):
        self._require_snapshots()
        return self._snapshots[-1]

    def index_of(self, t, atol=1e-12):
        matches = np.flatnonzero(np.abs(self.times - t) <= atol * max(1.0, abs(t)))
        return int(matches[0]) if matches.size else None

    def at(self, t):
        """The snapshot recorded at time t."""
        self._require_snapshots()
        index = self.index_of(t)
        if index is None:
            raise DomainError(f"no snapshot at t={t:g}; recorded times are {list(self.times)}")
        return self._snapshots[index].u

    # --- time interpolation --------------------------------------------------

    @cached_property
    def _spline(self):
        if len(self) < MIN_SPLINE_SNAPSHOTS:
            raise UsageError(
                f"cubic time interpolation needs >= {MIN_SPLINE_SNAPSHOTS} snapshots, trajectory has {len(self)}"
            )
        return CubicSpline(self.times, self.values, axis=0)

    def _check_time(self, t):
        self._require_snapshots()
        lo, hi = self.times[0], self.times[-1]
        slack = 1e-12 * max(1.0, abs(hi))
        if t < lo - slack or t > hi + slack:
            raise DomainError(f"t={t:g} lies outside the recorded interval [{lo:g}, {hi:g}]")
        return min(max(t, lo), hi)

    def sample(self, t):
        """u(t) by cubic interpolation in time; exact at recorded snapshot times."""
        t = self._check_time(t)
        index = self.index_of(t, atol=0.0)
        if index is not None:
            return self._snapshots[index].u
        return ScalarField(self.grid, self._spline(t))

    def time_derivative(self, t):
        """∂u/∂t at time t from the cubic interpolant."""
        t = self._check_time(t)
        return ScalarField(self.grid, self._spline(t, 1))

    # --- derived trajectories ---------------------------------------------------

    def select(self, times):
        """Sub-trajectory holding exactly the requested recorded times."""
        states = [FlowState(self.times[i], self._snapshots[i].u)
                  for i in (self._index_or_raise(t) for t in times)]
        return self._derived(states)

    def _index_or_raise(self, t):
        index = self.index_of(t)
        if index is None:
            raise UsageError(f"no snapshot at t={t:g}; recorded times are {list(self.times)}")
        return index

    def resample(self, grid):
        """The same snapshots interpolated onto another (smaller or equal) grid."""
        if grid == self.grid:
            return self
        return self._derived([FlowState(s.t, resample(s.u, grid)) for s in self._snapshots])

    def map_fields(self, fn, metadata=None):
        """New trajectory with u replaced by fn(t, u) at every snapshot."""
        return self._derived([FlowState(s.t, fn(s.t, s.u)) for s in self._snapshots], metadata)

    def _derived(self, states, metadata=None):
        merged = dict(self.metadata)
        merged.update(metadata or {})
        return Trajectory(states, config=self.config.with_snapshots([s.t for s in states]),
                          policy=self.policy, metadata=merged)


def common_times(first, second, atol=1e-12):
    """Times recorded by both trajectories, taken from the first."""
    return [float(t) for t in first.times if second.index_of(t, atol) is not None]


def exact_trajectory(solution, grid, times, a=1.0):
    """
    Closed-form reference trajectory: 'bigbang' (curvature -1/(2t), times > 0)
    or 'expanding' (curvature -1/(2t + 1) on the disc of radius a).
    """
    times = [float(t) for t in times]
    if not times:
        raise UsageError("exact trajectory needs at least one time")
    states = [FlowState(t, exact_field(solution, grid, t, a)) for t in times]
    config = FlowConfig(snapshot_times=times)
    metadata = {"exact": solution, "a": a}
    return Trajectory(states, config=config, policy=exact_policy(solution, a), metadata=metadata)
