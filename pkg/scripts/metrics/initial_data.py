"""
Initial metrics: the sample corpus with K <= -1, closed-form reference
metrics, CLI descriptors, and the smoothed maximum of u0 with the
hyperbolic factors h_k of the exhausting discs D_k.

Descriptors look like "restricted-hyperbolic:R=2.0" or
"scaled-flat-like:R=2,amp=0.5,quad=0.1".
"""

import logging

import numpy as np

from scripts.common.errors import ConfigError, GenerationError, PreconditionError
from scripts.grid.disc_grid import DiscGrid
from scripts.grid.fields import ScalarField, resample
from scripts.metrics.conformal import (
    ConformalMetric,
    bigbang_factor,
    expanding_hyperbolic,
    hyperbolic_factor,
    require_curvature_below,
)
from scripts.metrics.cutoff import CutoffSpec, psi

logger = logging.getLogger(__name__)

# corpus of initial metrics with K <= -1
SAMPLE_DEFAULTS = {
    "restricted-hyperbolic": {"R": 2.0},
    "scaled-flat-like": {"R": 2.0, "amp": 0.5, "quad": 0.0},
    "complete-hyperbolic": {},
}

# closed-form metrics that are not part of the K <= -1 corpus
REFERENCE_DEFAULTS = {
    "expanding-hyperbolic": {"a": 1.0, "t": 0.0},
    "bigbang": {"t": 0.5},
    "flat": {"level": 0.0},
}


def parse_initial_descriptor(text):
    """Split 'name:key=value,key=value' into (name, {key: float})."""
    if not text or not text.strip():
        raise ConfigError("empty initial-metric descriptor")
    name, _, rest = text.strip().partition(":")
    name = name.strip()
    if name not in SAMPLE_DEFAULTS and name not in REFERENCE_DEFAULTS:
        known = sorted(SAMPLE_DEFAULTS) + sorted(REFERENCE_DEFAULTS)
        raise ConfigError(f"unknown initial metric '{name}', expected one of {known}")
    params = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"malformed parameter '{item}' in descriptor '{text}' (expected key=value)")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"parameter '{key.strip()}' in descriptor '{text}' is not a number: '{value}'")
    return name, params


def format_descriptor(name, params):
    if not params:
        return name
    return name + ":" + ",".join(f"{key}={params[key]!r}" for key in sorted(params))


def _merged(name, params, defaults):
    unknown = set(params or {}) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown parameters {sorted(unknown)} for '{name}', allowed: {sorted(defaults)}")
    merged = dict(defaults)
    merged.update(params or {})
    return merged


def sample_initial(name, grid, params=None, check=True):
    """
    Sample metric from the corpus with K <= -1 on the given grid.

    restricted-hyperbolic(R > 1): curvature -1 metric of the disc of radius R,
    restricted to the unit disc (incomplete).
    scaled-flat-like(R, amp, quad): the same plus the non-positive perturbation
    -amp (1 - |x|^2/R^2) + quad (x^2 - y^2)/R^2, whose Laplacian is >= 0,
    so K stays <= -1 while the metric shrinks.
    complete-hyperbolic: the complete curvature -1 metric of the unit disc.
    """
    if name not in SAMPLE_DEFAULTS:
        raise ConfigError(f"unknown sample metric '{name}', expected one of {sorted(SAMPLE_DEFAULTS)}")
    p = _merged(name, params, SAMPLE_DEFAULTS[name])

    if name == "complete-hyperbolic":
        u = hyperbolic_factor(grid, 1.0, 1.0)
        complete = True
    else:
        R = p["R"]
        if R <= 1.0:
            raise ConfigError(f"{name} needs R > 1 (incomplete on the unit disc), got R={R}")
        u = hyperbolic_factor(grid, R, 1.0)
        complete = False
        if name == "scaled-flat-like":
            amp, quad = p["amp"], p["quad"]
            if amp < 0:
                raise ConfigError(f"scaled-flat-like needs amp >= 0, got amp={amp}")
            if abs(quad) > amp * (R * R - 1.0):
                raise ConfigError(
                    f"scaled-flat-like needs |quad| <= amp (R^2 - 1) = {amp * (R * R - 1.0):.6g} "
                    f"to keep the perturbation non-positive, got quad={quad}"
                )
            r2 = grid.node_r ** 2
            bump = -amp * (1.0 - r2 / (R * R)) + quad * (grid.x ** 2 - grid.y ** 2) / (R * R)
            u = u + ScalarField(grid, bump)

    ring_curvature = 1.0 if name != "scaled-flat-like" else None
    metric = ConformalMetric(u, complete=complete, descriptor=format_descriptor(name, params or {}),
                             ring_curvature=ring_curvature)
    if check:
        try:
            require_curvature_below(metric, -1.0, what=f"sample '{name}'")
        except PreconditionError as exc:
            raise GenerationError(str(exc)) from exc
    return metric


def reference_metric(name, grid, params=None):
    """Closed-form metrics used as exact-solution inputs (not required to have K <= -1)."""
    p = _merged(name, params, REFERENCE_DEFAULTS[name])
    descriptor = format_descriptor(name, params or {})
    if name == "expanding-hyperbolic":
        t = p["t"]
        u = expanding_hyperbolic(grid, p["a"], t)
        return ConformalMetric(u, complete=p["a"] >= 1.0, descriptor=descriptor,
                               ring_curvature=1.0 / (2.0 * t + 1.0))
    if name == "bigbang":
        t = p["t"]
        return ConformalMetric(bigbang_factor(grid, t), complete=True, descriptor=descriptor,
                               ring_curvature=1.0 / (2.0 * t))
    return ConformalMetric(ScalarField.constant(grid, p["level"]), complete=False,
                           descriptor=descriptor, ring_curvature=0.0)


def initial_metric(descriptor, grid, check=True):
    """Resolve a CLI descriptor to a metric on the grid."""
    name, params = parse_initial_descriptor(descriptor)
    if name in SAMPLE_DEFAULTS:
        return sample_initial(name, grid, params, check=check)
    return reference_metric(name, grid, params)


def restrict_metric(m, grid):
    """The same metric on another grid: re-evaluated from its descriptor when known, resampled otherwise."""
    if grid == m.grid:
        return m
    if m.descriptor:
        return initial_metric(m.descriptor, grid, check=False)
    return ConformalMetric(resample(m.u, grid), complete=m.complete, ring_curvature=m.ring_curvature)


# --- exhaustion by subdiscs ----------------------------------------------------

def exhaustion_radius(k):
    """Radius 1 - 1/(k + 1) = k/(k + 1) of the subdisc D_k."""
    if k < 1 or int(k) != k:
        raise ConfigError(f"exhaustion index k must be a positive integer, got {k}")
    return k / (k + 1.0)


def exhaustion_grid(template, k, n_r=None):
    """Grid on D_k with the template's angular resolution, clustering and collar."""
    return DiscGrid(
        a=exhaustion_radius(k),
        n_r=template.n_r if n_r is None else n_r,
        n_theta=template.n_theta,
        clustering=template.clustering,
        collar=template.collar,
    )


def hk_factor(grid, k):
    """Complete metric of curvature -k^2 on D_k."""
    return hyperbolic_factor(grid, exhaustion_radius(k), float(k * k))


def smoothed_max_initial(u0, k, spec, grid=None, check=True):
    """
    ū_k = u0 + Ψ(h_k - u0) on D_k's grid.

    u0 is brought onto the grid with restrict_metric. With check=True the
    curvature precondition K[u0] <= -1 is verified on the check domain.
    """
    if not isinstance(spec, CutoffSpec):
        spec = CutoffSpec(float(spec))
    grid = exhaustion_grid(u0.grid, k) if grid is None else grid
    base = restrict_metric(u0, grid)
    if check:
        require_curvature_below(base, -1.0, what="u0")
    hk = hk_factor(grid, k).values
    blended = base.u.values + psi(hk - base.u.values, spec)

    gap = hk[grid.ring_mask] - base.u.values[grid.ring_mask]
    if np.min(gap) < spec.eta:
        logger.warning(
            "k=%d: h_k - u0 = %.3g at the truncation ring is below eta=%.3g; ring data is not purely h_k",
            k, float(np.min(gap)), spec.eta,
        )
    return ConformalMetric(ScalarField(grid, blended), complete=True,
                           descriptor=None, ring_curvature=float(k * k))
