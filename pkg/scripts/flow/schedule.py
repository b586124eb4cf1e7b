"""
Solver configuration and Dirichlet data on the truncation ring.

FlowConfig carries the integration scheme and the snapshot schedule.
BoundaryPolicy decides the ring values for every t >= 0:

    frozen                  ring values stay at their initial values
    constant-curvature      ring0 + ½ ln(2 c0 t + 1), the flow of a metric
                            of constant curvature -c0 near the ring
    prescribed              a callable (t, grid) -> ring values, e.g. an
                            exact solution evaluated on the ring
"""

import logging
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Callable, Optional

import numpy as np

from scripts.common.errors import ConfigError, UsageError
from scripts.metrics.conformal import bigbang_factor, expanding_hyperbolic, gauss_curvature

import disc_config

logger = logging.getLogger(__name__)

SCHEMES = ("explicit-rk2", "semi-implicit")
POLICY_KINDS = ("frozen", "constant-curvature", "prescribed")
EXACT_SOLUTIONS = ("bigbang", "expanding")


@dataclass(frozen=True)
class FlowConfig:
    scheme: str = disc_config.DEFAULT_SCHEME
    cfl_safety: float = disc_config.DEFAULT_CFL_SAFETY
    dt_max: float = disc_config.DEFAULT_DT_MAX
    snapshot_times: tuple = ()
    tolerance: float = disc_config.DEFAULT_SOLVER_TOLERANCE
    divergence_bound: float = disc_config.DIVERGENCE_BOUND

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme '{self.scheme}', expected one of {SCHEMES}")
        if not 0.0 < self.cfl_safety <= 1.0:
            raise ConfigError(f"cfl_safety must lie in (0, 1], got {self.cfl_safety}")
        if not self.dt_max > 0:
            raise ConfigError(f"dt_max must be > 0, got {self.dt_max}")
        if self.scheme == "semi-implicit" and not np.isfinite(self.dt_max):
            raise ConfigError("the semi-implicit scheme has no CFL limit and needs a finite dt_max")
        if not 0.0 < self.tolerance < 1.0:
            raise ConfigError(f"solver tolerance must lie in (0, 1), got {self.tolerance}")
        if not self.divergence_bound > 0:
            raise ConfigError(f"divergence bound must be > 0, got {self.divergence_bound}")
        times = tuple(float(t) for t in self.snapshot_times)
        if any(not np.isfinite(t) or t < 0 for t in times):
            raise ConfigError(f"snapshot times must be finite and >= 0, got {list(times)}")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigError(f"snapshot times must be strictly increasing, got {list(times)}")
        object.__setattr__(self, "snapshot_times", times)

    def with_snapshots(self, times):
        return replace(self, snapshot_times=tuple(times))

    def to_dict(self):
        return {
            "scheme": self.scheme,
            "cfl_safety": self.cfl_safety,
            "dt_max": self.dt_max if np.isfinite(self.dt_max) else None,
            "snapshot_times": list(self.snapshot_times),
            "tolerance": self.tolerance,
            "divergence_bound": self.divergence_bound,
        }

    @classmethod
    def from_dict(cls, payload):
        payload = dict(payload)
        if payload.get("dt_max") is None:
            payload["dt_max"] = float("inf")
        payload["snapshot_times"] = tuple(payload.get("snapshot_times", ()))
        return cls(**payload)


def snapshot_schedule(T, count):
    """count + 1 evenly spaced snapshot times on [0, T]."""
    if count < 1:
        raise ConfigError(f"snapshot count must be >= 1, got {count}")
    return tuple(float(t) for t in np.linspace(0.0, T, count + 1))


@dataclass(frozen=True)
class BoundaryPolicy:
    kind: str
    c0: Optional[float] = None
    label: Optional[str] = None
    fn: Optional[Callable] = field(default=None, compare=False, repr=False)
    ring0: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ConfigError(f"unknown boundary policy '{self.kind}', expected one of {POLICY_KINDS}")
        if self.c0 is not None and not self.c0 >= 0:
            raise ConfigError(f"ring curvature magnitude c0 must be >= 0, got {self.c0}")
        if self.kind == "prescribed" and self.fn is None:
            raise ConfigError("prescribed boundary policy needs a ring function")

    @property
    def anchored(self):
        return self.ring0 is not None or self.kind == "prescribed"

    def anchor(self, metric):
        """Fix the initial ring values (and c0 if unset) from the initial metric."""
        u = metric.u
        ring0 = np.array(u.ring_values())
        ring0.setflags(write=False)
        c0 = self.c0
        if self.kind == "constant-curvature" and c0 is None:
            if getattr(metric, "ring_curvature", None) is not None:
                c0 = float(metric.ring_curvature)
            else:
                # one-sided stencil value, first order only
                K = gauss_curvature(u).values[u.grid.ring_mask]
                c0 = float(max(-np.mean(K), 0.0))
                logger.info("ring curvature not known in closed form, measured c0=%.6g", c0)
        return replace(self, c0=c0, ring0=ring0)

    def ring_values(self, t, grid):
        if self.kind == "prescribed":
            values = np.broadcast_to(np.asarray(self.fn(t, grid), dtype=float), (grid.n_theta,))
            return np.array(values)
        if self.ring0 is None:
            raise UsageError(f"boundary policy '{self.kind}' must be anchored to initial data first")
        if self.kind == "frozen":
            return np.array(self.ring0)
        return self.ring0 + 0.5 * np.log(2.0 * self.c0 * t + 1.0)

    def describe(self):
        if self.kind == "constant-curvature":
            return f"constant-curvature(c0={self.c0:g})" if self.c0 is not None else "constant-curvature"
        if self.kind == "prescribed":
            return f"prescribed({self.label})"
        return self.kind

    def to_dict(self):
        return {"kind": self.kind, "c0": self.c0, "label": self.label}

    @classmethod
    def from_dict(cls, payload):
        kind = payload["kind"]
        if kind == "prescribed":
            return policy_from_text(f"prescribed:{payload['label']}")
        return cls(kind=kind, c0=payload.get("c0"), label=payload.get("label"))


def _exact_ring(solution, a, t0, t, grid):
    return exact_field(solution, grid, t0 + t, a).ring_values()


def exact_field(solution, grid, t, a=1.0):
    """Closed-form flow field at time t: big-bang (a = 1) or expanding hyperbolic on the disc of radius a."""
    if solution == "bigbang":
        return bigbang_factor(grid, t)
    if solution == "expanding":
        return expanding_hyperbolic(grid, a, t)
    raise ConfigError(f"unknown exact solution '{solution}', expected one of {EXACT_SOLUTIONS}")


def exact_policy(solution, a=1.0, t0=0.0):
    """Ring data of a closed-form solution started at time t0."""
    if solution not in EXACT_SOLUTIONS:
        raise ConfigError(f"unknown exact solution '{solution}', expected one of {EXACT_SOLUTIONS}")
    label = f"{solution}:a={a!r},t0={t0!r}"
    return BoundaryPolicy(kind="prescribed", label=label, fn=partial(_exact_ring, solution, a, t0))


def policy_from_text(text):
    """
    Parse a CLI policy: 'frozen', 'constant-curvature', 'constant-curvature:c0=1',
    or 'prescribed:bigbang:t0=0.5' / 'prescribed:expanding:a=1,t0=0'.
    """
    kind, _, rest = (text or "").strip().partition(":")
    if kind == "frozen" and not rest:
        return BoundaryPolicy("frozen")
    if kind == "constant-curvature":
        if not rest:
            return BoundaryPolicy("constant-curvature")
        key, _, value = rest.partition("=")
        if key.strip() != "c0":
            raise ConfigError(f"constant-curvature accepts only c0=<value>, got '{rest}'")
        try:
            return BoundaryPolicy("constant-curvature", c0=float(value))
        except ValueError:
            raise ConfigError(f"c0 is not a number: '{value}'")
    if kind == "prescribed":
        solution, _, params = rest.partition(":")
        values = {"a": 1.0, "t0": 0.0}
        for item in filter(None, (p.strip() for p in params.split(","))):
            key, sep, value = item.partition("=")
            if not sep or key.strip() not in values:
                raise ConfigError(f"prescribed policy accepts a=<value>, t0=<value>, got '{item}'")
            try:
                values[key.strip()] = float(value)
            except ValueError:
                raise ConfigError(f"'{key.strip()}' is not a number: '{value}'")
        return exact_policy(solution.strip(), values["a"], values["t0"])
    raise ConfigError(
        f"unknown boundary policy '{text}', expected frozen, constant-curvature[:c0=..] "
        f"or prescribed:<bigbang|expanding>[:a=..,t0=..]"
    )
