"""
The exhaustion plan: which subdiscs D_k to run, at what resolution, with
which cutoff width and stopping tolerance.
"""

import math
from dataclasses import asdict, dataclass

from scripts.common.errors import ConfigError, UsageError
from scripts.grid.disc_grid import DiscGrid, grid_with_truncation
from scripts.metrics.cutoff import CutoffSpec
from scripts.metrics.initial_data import exhaustion_radius

import disc_config


def hyperbolic_length(r):
    """Distance from the center to radius r in the curvature -1 metric of the unit disc."""
    return math.log((1.0 + r) / (1.0 - r))


@dataclass(frozen=True)
class ExhaustionPlan:
    k_list: tuple = disc_config.DEFAULT_K_LIST
    eta: float = disc_config.DEFAULT_ETA
    T: float = disc_config.DEFAULT_HORIZON
    limit_tol: float = disc_config.DEFAULT_LIMIT_TOL
    n_r: int = disc_config.DEFAULT_N_R
    n_theta: int = disc_config.DEFAULT_N_THETA
    clustering: float = disc_config.DEFAULT_CLUSTERING
    collar: float = disc_config.DEFAULT_COLLAR
    scale_n_r: bool = True
    n_r_max: int = disc_config.DEFAULT_N_R_MAX
    reference_radius: float = disc_config.DEFAULT_REFERENCE_RADIUS
    n_r_reference: int = disc_config.DEFAULT_N_R_REFERENCE
    workers: int = disc_config.DEFAULT_WORKERS

    def __post_init__(self):
        k_list = tuple(self.k_list)
        if not k_list:
            raise UsageError("exhaustion plan needs at least one k")
        if any(int(k) != k or k < 1 for k in k_list):
            raise ConfigError(f"k_list must hold positive integers, got {list(k_list)}")
        if any(b <= a for a, b in zip(k_list, k_list[1:])):
            raise ConfigError(f"k_list must be strictly increasing, got {list(k_list)}")
        object.__setattr__(self, "k_list", tuple(int(k) for k in k_list))
        CutoffSpec(self.eta)
        if not self.T > 0:
            raise ConfigError(f"horizon T must be > 0, got {self.T}")
        if not self.limit_tol > 0:
            raise ConfigError(f"limit_tol must be > 0, got {self.limit_tol}")
        if not 0.0 < self.reference_radius < 1.0:
            raise ConfigError(f"reference_radius must lie in (0, 1), got {self.reference_radius}")
        if self.n_r_max < self.n_r:
            raise ConfigError(f"n_r_max={self.n_r_max} is below the base n_r={self.n_r}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        # validates n_r, n_theta, clustering and collar
        self.grid_for(self.k_list[0])
        self.reference_grid()

    @property
    def cutoff(self):
        return CutoffSpec(self.eta)

    @property
    def k_max(self):
        return self.k_list[-1]

    def truncation_radius(self, k):
        return exhaustion_radius(k) * (1.0 - self.collar)

    def n_r_for(self, k):
        """Base n_r scaled with the hyperbolic length of D_k's truncation radius, capped at n_r_max."""
        if not self.scale_n_r:
            return self.n_r
        base = hyperbolic_length(self.truncation_radius(self.k_list[0]))
        scaled = math.ceil(self.n_r * hyperbolic_length(self.truncation_radius(k)) / base)
        return int(min(max(scaled, self.n_r), self.n_r_max))

    def grid_for(self, k):
        return DiscGrid(a=exhaustion_radius(k), n_r=self.n_r_for(k), n_theta=self.n_theta,
                        clustering=self.clustering, collar=self.collar)

    def comparison_radius(self, k):
        return min(self.reference_radius, self.truncation_radius(k))

    def comparison_grid(self, k):
        """Uniform grid on which u_k is compared with its successor."""
        return grid_with_truncation(self.comparison_radius(k), self.n_r_reference, self.n_theta)

    def reference_grid(self):
        return self.comparison_grid(self.k_max)

    def hyperbolic_gap(self, lower_k, upper_k):
        """
        ln 2a/(a^2 - r^2) on D_k minus the same on D_k', at the comparison
        radius of D_k (where the difference is largest).

        Flows from data far below the hyperbolic metric settle between the
        big-bang and expanding flows of their own disc, both of which carry
        this term, so the sup change of the pair approaches it. It shrinks
        like 1/k, not faster.
        """
        r = self.comparison_radius(lower_k)

        def factor(a):
            return math.log(2.0 * a / (a * a - r * r))

        return factor(exhaustion_radius(lower_k)) - factor(exhaustion_radius(upper_k))

    def to_dict(self):
        payload = asdict(self)
        payload["k_list"] = list(self.k_list)
        return payload

    @classmethod
    def from_dict(cls, payload):
        payload = dict(payload)
        payload["k_list"] = tuple(payload["k_list"])
        return cls(**payload)
