"""
Trajectory directories on disk.

    <path>/manifest.json        format_version, grid header, config, policy,
                                snapshot list, metadata
    <path>/snapshots/snap_NNNN.rdf
    <path>/diagnostics.csv      t, dt, min_u, max_u, min_K, max_K per step
"""

import logging
import os

import pandas as pd

from scripts.common.errors import UsageError
from scripts.common.file_utils import load_json, safe_save_csv, safe_save_json
from scripts.grid.disc_grid import grid_from_header
from scripts.grid.field_io import read_field, write_field
from scripts.flow.schedule import BoundaryPolicy, FlowConfig
from scripts.flow.trajectory import DIAGNOSTIC_COLUMNS, FlowState, Trajectory

import disc_config

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"
DIAGNOSTICS = "diagnostics.csv"


def snapshot_name(index):
    return os.path.join("snapshots", f"snap_{index:04d}.rdf")


def save_trajectory(traj, path):
    """Write the trajectory directory; returns the manifest path."""
    os.makedirs(os.path.join(path, "snapshots"), exist_ok=True)
    entries = []
    for index, state in enumerate(traj):
        name = snapshot_name(index)
        write_field(os.path.join(path, name), state.u, state.t)
        entries.append({"index": index, "t": state.t, "file": name.replace(os.sep, "/")})

    manifest = {
        "format_version": disc_config.FORMAT_VERSION,
        "grid": traj.grid.header() if len(traj) else None,
        "config": traj.config.to_dict(),
        "policy": traj.policy.to_dict() if traj.policy is not None else None,
        "snapshots": entries,
        "metadata": traj.metadata,
    }
    manifest_path = os.path.join(path, MANIFEST)
    if not safe_save_json(manifest, manifest_path, "trajectory manifest"):
        raise OSError(f"could not write {manifest_path}")
    diagnostics = traj.diagnostics if len(traj.diagnostics) else pd.DataFrame(columns=DIAGNOSTIC_COLUMNS)
    safe_save_csv(diagnostics, os.path.join(path, DIAGNOSTICS), "step diagnostics")
    logger.info("trajectory with %d snapshots saved to %s", len(traj), path)
    return manifest_path


def load_trajectory(path):
    manifest_path = os.path.join(path, MANIFEST)
    if not os.path.exists(manifest_path):
        raise UsageError(f"no trajectory found at {path} (missing {MANIFEST})")
    manifest = load_json(manifest_path)
    version = manifest.get("format_version")
    if version != disc_config.FORMAT_VERSION:
        raise UsageError(f"{manifest_path}: unsupported format_version {version!r}")

    grid = grid_from_header(manifest["grid"]) if manifest.get("grid") else None
    states = []
    for entry in manifest["snapshots"]:
        field, t = read_field(os.path.join(path, entry["file"]))
        if field.grid != grid:
            raise UsageError(f"{entry['file']}: grid {field.grid!r} does not match manifest grid {grid!r}")
        if t != entry["t"]:
            raise UsageError(f"{entry['file']}: header time {t!r} does not match manifest time {entry['t']!r}")
        states.append(FlowState(t, field))

    diagnostics_path = os.path.join(path, DIAGNOSTICS)
    if os.path.exists(diagnostics_path):
        diagnostics = pd.read_csv(diagnostics_path, float_precision="round_trip")
    else:
        diagnostics = pd.DataFrame(columns=DIAGNOSTIC_COLUMNS)
    policy = BoundaryPolicy.from_dict(manifest["policy"]) if manifest.get("policy") else None
    return Trajectory(states, config=FlowConfig.from_dict(manifest["config"]), policy=policy,
                      diagnostics=diagnostics, metadata=manifest.get("metadata", {}))
