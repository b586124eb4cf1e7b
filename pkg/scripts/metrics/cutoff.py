"""
The cutoff Ψ used to blend initial data with the hyperbolic factors.

Ψ(s) = 0 for s <= -η, (s + η)^2 / (4η) for |s| < η, s for s >= η.
It is C^1, convex, satisfies 0 <= Ψ' <= 1, Ψ(s) >= s and Ψ(s) >= 0.
"""

from dataclasses import dataclass

import numpy as np

from scripts.common.errors import ConfigError


@dataclass(frozen=True)
class CutoffSpec:
    eta: float

    def __post_init__(self):
        if not np.isfinite(self.eta) or self.eta <= 0:
            raise ConfigError(f"cutoff width eta must be > 0, got {self.eta}")


def psi(s, spec):
    eta = spec.eta
    s = np.asarray(s, dtype=float)
    out = np.where(s >= eta, s, np.where(s <= -eta, 0.0, (s + eta) ** 2 / (4.0 * eta)))
    return out if out.ndim else float(out)


def psi_prime(s, spec):
    eta = spec.eta
    s = np.asarray(s, dtype=float)
    out = np.where(s >= eta, 1.0, np.where(s <= -eta, 0.0, (s + eta) / (2.0 * eta)))
    return out if out.ndim else float(out)


def psi_second(s, spec):
    """Piecewise second derivative: 1/(2η) inside (-η, η), zero outside."""
    eta = spec.eta
    s = np.asarray(s, dtype=float)
    out = np.where(np.abs(s) < eta, 1.0 / (2.0 * eta), 0.0)
    return out if out.ndim else float(out)
