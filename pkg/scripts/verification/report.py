"""
Verifier reports and report bundles.

Every inequality check is reduced to per-node margins (positive means the
inequality holds with slack) and per-node tolerances tol_i = factor * h^2 *
(1 + |v_i|). The reported node is the one most violated relative to its
tolerance, and a report passes iff margin >= -tolerance there.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from scripts.common.errors import UsageError
from scripts.common.file_utils import load_json, safe_save_json
from scripts.metrics.conformal import curvature_tolerance

import disc_config

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VerifierReport:
    check: str
    margin: float
    tolerance: float
    location: dict = field(default_factory=dict)
    domain: str = "check"
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return bool(self.margin >= -self.tolerance)

    def to_dict(self):
        return {
            "check": self.check,
            "pass": self.passed,
            "margin": float(self.margin),
            "tolerance": float(self.tolerance),
            "location": dict(self.location),
            "domain": self.domain,
            "details": dict(self.details),
        }

    @classmethod
    def from_dict(cls, payload):
        return cls(
            check=payload["check"],
            margin=float(payload["margin"]),
            tolerance=float(payload["tolerance"]),
            location=dict(payload.get("location", {})),
            domain=payload.get("domain", "check"),
            details=dict(payload.get("details", {})),
        )

    def summary_line(self):
        status = "PASS" if self.passed else "FAIL"
        where = ", ".join(f"{key}={value:.4g}" for key, value in self.location.items())
        return f"{status} {self.check}: margin {self.margin:+.3e} (tol {self.tolerance:.2e}) at {where or '-'}"


def check_mask(grid, fraction=None, full=False):
    """Mask and domain label used by every verifier."""
    fraction = disc_config.CHECK_FRACTION if fraction is None else fraction
    if full:
        return grid.check_mask(full=True), "full (collar included)"
    return grid.check_mask(fraction), f"r <= {fraction:g} R_trunc"


def trajectory_mask(traj, full=False):
    return check_mask(traj.grid, traj.metadata.get("check_fraction"), full)


def node_tolerance(grid, values, mask, factor=None):
    """factor * h^2 * (1 + |v|) with h the largest radial spacing on the mask."""
    return curvature_tolerance(grid, values, mask, factor)


class WorstCase:
    """Running reduction over (t, margin array, tolerance array) samples."""

    def __init__(self, check, domain, details=None):
        self.check = check
        self.domain = domain
        self.details = dict(details or {})
        self._best = None

    @property
    def empty(self):
        return self._best is None

    def add(self, t, grid, mask, margin, tol):
        margin = np.broadcast_to(np.asarray(margin, dtype=float), (grid.n_nodes,))
        tol = np.broadcast_to(np.asarray(tol, dtype=float), (grid.n_nodes,))
        slack = np.where(mask, margin + tol, np.inf)
        index = int(np.argmin(slack))
        if not np.isfinite(slack[index]):
            return
        if self._best is None or slack[index] < self._best[0]:
            r, theta = grid.location(index)
            location = {"r": r, "theta": theta} if t is None else {"t": float(t), "r": r, "theta": theta}
            self._best = (slack[index], float(margin[index]), float(tol[index]), location)

    def report(self):
        if self._best is None:
            raise UsageError(f"{self.check}: no snapshot or node fell inside the checked domain")
        _, margin, tol, location = self._best
        return VerifierReport(self.check, margin, tol, location, self.domain, self.details)


def write_bundle(reports, path, extra=None):
    """JSON bundle of reports with the overall pass flag."""
    payload = {
        "format_version": disc_config.FORMAT_VERSION,
        "pass": all(r.passed for r in reports),
        "reports": [r.to_dict() for r in reports],
    }
    payload.update(extra or {})
    if not safe_save_json(payload, path, "report bundle"):
        raise OSError(f"could not write report bundle {path}")
    logger.info("%d reports written to %s (%s)", len(reports), path, "pass" if payload["pass"] else "fail")
    return payload


def load_bundle(path):
    payload = load_json(path)
    if "reports" not in payload:
        raise UsageError(f"{path} is not a report bundle")
    return [VerifierReport.from_dict(item) for item in payload["reports"]]
