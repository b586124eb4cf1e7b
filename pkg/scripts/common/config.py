"""
Experiment configuration files.

Flat key=value text with sections, read with configparser:

    [grid]      n_r, n_theta, clustering, collar
    [flow]      scheme, cfl_safety, dt_max, tolerance, divergence_bound,
                horizon, snapshots, policy
    [plan]      k_list, limit_tol, scale_n_r, n_r_max, reference_radius,
                n_r_reference, workers
    [cutoff]    eta
    [initial]   descriptor
    [output]    root

Unknown sections or keys are rejected. Command-line flags override file
values, RICCI_DISC_OUT overrides the output root. See docs/CONFIG_FORMAT.md.
"""

import configparser
import logging
import math
import os
from dataclasses import dataclass, field

from scripts.common.errors import ConfigError
from scripts.construction.plan import ExhaustionPlan
from scripts.flow.schedule import FlowConfig, policy_from_text, snapshot_schedule
from scripts.grid.disc_grid import build_grid

import disc_config

logger = logging.getLogger(__name__)

OUTPUT_ENV = "RICCI_DISC_OUT"


def int_list(text):
    """"2, 4,8" -> (2, 4, 8)."""
    return tuple(int(item) for item in text.replace(" ", "").split(",") if item)


def _bool(text):
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: '{text}'")


SCHEMA = {
    "grid": {"n_r": int, "n_theta": int, "clustering": float, "collar": float},
    "flow": {
        "scheme": str,
        "cfl_safety": float,
        "dt_max": float,
        "tolerance": float,
        "divergence_bound": float,
        "horizon": float,
        "snapshots": int,
        "policy": str,
    },
    "plan": {
        "k_list": int_list,
        "limit_tol": float,
        "scale_n_r": _bool,
        "n_r_max": int,
        "reference_radius": float,
        "n_r_reference": int,
        "workers": int,
    },
    "cutoff": {"eta": float},
    "initial": {"descriptor": str},
    "output": {"root": str},
}

DEFAULTS = {
    "grid": {
        "n_r": disc_config.DEFAULT_N_R,
        "n_theta": disc_config.DEFAULT_N_THETA,
        "clustering": disc_config.DEFAULT_CLUSTERING,
        "collar": disc_config.DEFAULT_COLLAR,
    },
    "flow": {
        "scheme": disc_config.DEFAULT_SCHEME,
        "cfl_safety": disc_config.DEFAULT_CFL_SAFETY,
        "dt_max": disc_config.DEFAULT_DT_MAX,
        "tolerance": disc_config.DEFAULT_SOLVER_TOLERANCE,
        "divergence_bound": disc_config.DIVERGENCE_BOUND,
        "horizon": disc_config.DEFAULT_HORIZON,
        "snapshots": disc_config.DEFAULT_SNAPSHOT_COUNT,
        "policy": "constant-curvature",
    },
    "plan": {
        "k_list": disc_config.DEFAULT_K_LIST,
        "limit_tol": disc_config.DEFAULT_LIMIT_TOL,
        "scale_n_r": True,
        "n_r_max": disc_config.DEFAULT_N_R_MAX,
        "reference_radius": disc_config.DEFAULT_REFERENCE_RADIUS,
        "n_r_reference": disc_config.DEFAULT_N_R_REFERENCE,
        "workers": disc_config.DEFAULT_WORKERS,
    },
    "cutoff": {"eta": disc_config.DEFAULT_ETA},
    "initial": {"descriptor": "restricted-hyperbolic:R=2.0"},
    "output": {"root": None},
}


@dataclass
class ExperimentConfig:
    """Validated parameter sets for one command, file values merged with flags."""

    values: dict = field(default_factory=lambda: {s: dict(v) for s, v in DEFAULTS.items()})
    source: str = None

    def get(self, section, key):
        return self.values[section][key]

    def override(self, section, key, value):
        """Flag override; None means the flag was not given."""
        if value is None:
            return
        if key not in SCHEMA.get(section, {}):
            raise ConfigError(f"unknown config key [{section}] {key}")
        self.values[section][key] = value

    # --- resolved objects ------------------------------------------------------

    @property
    def horizon(self):
        T = self.get("flow", "horizon")
        if not T >= 0:
            raise ConfigError(f"horizon must be >= 0, got {T}")
        return T

    def grid(self, a=1.0):
        g = self.values["grid"]
        return build_grid(a=a, n_r=g["n_r"], n_theta=g["n_theta"],
                          clustering=g["clustering"], collar=g["collar"])

    def snapshot_times(self):
        T = self.horizon
        if T == 0:
            return (0.0,)
        return snapshot_schedule(T, self.get("flow", "snapshots"))

    def flow_config(self):
        f = self.values["flow"]
        return FlowConfig(scheme=f["scheme"], cfl_safety=f["cfl_safety"], dt_max=f["dt_max"],
                          snapshot_times=self.snapshot_times(), tolerance=f["tolerance"],
                          divergence_bound=f["divergence_bound"])

    def policy(self):
        return policy_from_text(self.get("flow", "policy"))

    def plan(self):
        p, g = self.values["plan"], self.values["grid"]
        return ExhaustionPlan(
            k_list=p["k_list"], eta=self.get("cutoff", "eta"), T=self.horizon, limit_tol=p["limit_tol"],
            n_r=g["n_r"], n_theta=g["n_theta"], clustering=g["clustering"], collar=g["collar"],
            scale_n_r=p["scale_n_r"], n_r_max=p["n_r_max"], reference_radius=p["reference_radius"],
            n_r_reference=p["n_r_reference"], workers=p["workers"],
        )

    @property
    def descriptor(self):
        return self.get("initial", "descriptor")

    def output_root(self):
        env = os.environ.get(OUTPUT_ENV)
        if env:
            return env
        return self.get("output", "root") or disc_config.OUTPUT_ROOT

    def output_path(self, out):
        """Relative paths land under the output root."""
        return out if os.path.isabs(out) else os.path.join(self.output_root(), out)

    def to_dict(self):
        """JSON-safe copy: tuples become lists, an infinite dt_max becomes None."""
        out = {}
        for section, values in self.values.items():
            out[section] = {}
            for key, value in values.items():
                if isinstance(value, tuple):
                    value = list(value)
                elif isinstance(value, float) and math.isinf(value):
                    value = None
                out[section][key] = value
        return out


def load_config(path=None):
    """Read a config file into an ExperimentConfig; path=None gives the defaults."""
    config = ExperimentConfig()
    if path is None:
        return config
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")

    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"{path}: unknown section [{section}], expected one of {sorted(SCHEMA)}")
        for key, raw in parser.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"{path}: unknown key '{key}' in [{section}], "
                                  f"allowed: {sorted(SCHEMA[section])}")
            try:
                config.values[section][key] = SCHEMA[section][key](raw)
            except ValueError as exc:
                raise ConfigError(f"{path}: bad value for [{section}] {key} = {raw!r} ({exc})") from exc
    config.source = path
    logger.info("loaded experiment config from %s", path)
    return config
