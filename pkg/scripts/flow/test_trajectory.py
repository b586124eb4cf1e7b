import json

import numpy as np
import pytest

from scripts.common.errors import ConfigError, DomainError, UsageError
from scripts.grid.disc_grid import build_grid
from scripts.grid.fields import ScalarField
from scripts.metrics.conformal import ConformalMetric, expanding_hyperbolic
from scripts.flow.persistence import load_trajectory, save_trajectory
from scripts.flow.schedule import BoundaryPolicy, FlowConfig, policy_from_text, snapshot_schedule
from scripts.flow.solver import run
from scripts.flow.trajectory import FlowState, Trajectory, common_times, exact_trajectory


# --- configuration and policies -------------------------------------------------

@pytest.mark.parametrize("kwargs", [
    {"scheme": "leapfrog"},
    {"cfl_safety": 0.0},
    {"cfl_safety": 1.2},
    {"dt_max": 0.0},
    {"scheme": "semi-implicit"},
    {"snapshot_times": [0.0, 0.5, 0.5]},
    {"snapshot_times": [-0.1, 0.5]},
    {"tolerance": 0.0},
])
def test_flow_config_rejects_bad_values(kwargs):
    with pytest.raises(ConfigError):
        FlowConfig(**kwargs)


def test_flow_config_dict_round_trip():
    cfg = FlowConfig(scheme="semi-implicit", dt_max=1e-3, snapshot_times=[0.0, 0.5])
    assert FlowConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg
    assert FlowConfig.from_dict(FlowConfig().to_dict()).dt_max == float("inf")


def test_snapshot_schedule():
    assert snapshot_schedule(1.0, 4) == (0.0, 0.25, 0.5, 0.75, 1.0)
    with pytest.raises(ConfigError):
        snapshot_schedule(1.0, 0)


def test_constant_curvature_ring_values(unit_radial_grid):
    u = expanding_hyperbolic(unit_radial_grid, 1.0, 0.0)
    policy = BoundaryPolicy("constant-curvature").anchor(ConformalMetric(u, ring_curvature=1.0))
    assert policy.c0 == 1.0
    np.testing.assert_allclose(policy.ring_values(1.0, unit_radial_grid),
                               expanding_hyperbolic(unit_radial_grid, 1.0, 1.0).ring_values(), atol=1e-12)


def test_constant_curvature_measures_c0_when_unknown():
    grid = build_grid(a=1.0, n_r=64, n_theta=1, collar=0.2)
    u = expanding_hyperbolic(grid, 1.0, 0.0)
    policy = BoundaryPolicy("constant-curvature").anchor(ConformalMetric(u))
    assert policy.c0 == pytest.approx(1.0, rel=0.1)


def test_frozen_ring_values(unit_radial_grid):
    u = expanding_hyperbolic(unit_radial_grid, 1.0, 0.0)
    policy = BoundaryPolicy("frozen").anchor(ConformalMetric(u))
    np.testing.assert_array_equal(policy.ring_values(5.0, unit_radial_grid), u.ring_values())


def test_unanchored_policy_has_no_ring_values(unit_radial_grid):
    with pytest.raises(UsageError):
        BoundaryPolicy("frozen").ring_values(0.0, unit_radial_grid)


def test_policy_text_forms(unit_radial_grid):
    assert policy_from_text("frozen") == BoundaryPolicy("frozen")
    assert policy_from_text("constant-curvature:c0=0.5").c0 == 0.5
    prescribed = policy_from_text("prescribed:bigbang:t0=0.5")
    assert prescribed.kind == "prescribed"
    np.testing.assert_allclose(prescribed.ring_values(0.5, unit_radial_grid),
                               exact_trajectory("bigbang", unit_radial_grid, [1.0]).final.u.ring_values())
    assert BoundaryPolicy.from_dict(prescribed.to_dict()) == prescribed


@pytest.mark.parametrize("text", ["", "sticky", "constant-curvature:c=1", "prescribed:sphere", "prescribed:bigbang:t0=x"])
def test_policy_text_errors(text):
    with pytest.raises(ConfigError):
        policy_from_text(text)


# --- trajectories ----------------------------------------------------------------

@pytest.fixture
def expanding_traj(unit_radial_grid):
    return exact_trajectory("expanding", unit_radial_grid, np.linspace(0.0, 1.0, 11))


def test_trajectory_rejects_unordered_times(unit_radial_grid):
    u = ScalarField.constant(unit_radial_grid, 0.0)
    with pytest.raises(UsageError):
        Trajectory([FlowState(0.5, u), FlowState(0.5, u)])


def test_trajectory_rejects_mixed_grids(unit_radial_grid):
    other = build_grid(a=1.0, n_r=32, n_theta=1)
    with pytest.raises(UsageError):
        Trajectory([FlowState(0.0, ScalarField.constant(unit_radial_grid, 0.0)),
                    FlowState(1.0, ScalarField.constant(other, 0.0))])


def test_negative_flow_time_is_rejected(unit_radial_grid):
    with pytest.raises(DomainError):
        FlowState(-1.0, ScalarField.constant(unit_radial_grid, 0.0))


def test_sample_is_exact_at_snapshots(expanding_traj):
    assert expanding_traj.sample(0.3) is expanding_traj[3].u


def test_sample_interpolates_cubically(expanding_traj, unit_radial_grid):
    exact = expanding_hyperbolic(unit_radial_grid, 1.0, 0.35).values
    np.testing.assert_allclose(expanding_traj.sample(0.35).values, exact, atol=2e-4)
    derivative = expanding_traj.time_derivative(0.35).values
    np.testing.assert_allclose(derivative, 1.0 / (2 * 0.35 + 1), atol=5e-3)


def test_sample_outside_the_interval(expanding_traj):
    with pytest.raises(DomainError):
        expanding_traj.sample(1.5)


def test_sample_needs_four_snapshots(unit_radial_grid):
    traj = exact_trajectory("expanding", unit_radial_grid, [0.0, 0.5, 1.0])
    with pytest.raises(UsageError):
        traj.sample(0.25)


def test_at_missing_time(expanding_traj):
    with pytest.raises(DomainError):
        expanding_traj.at(0.33)


def test_select_and_common_times(expanding_traj, unit_radial_grid):
    sub = expanding_traj.select([0.2, 0.6])
    assert list(sub.times) == [0.2, 0.6]
    other = exact_trajectory("expanding", unit_radial_grid, [0.2, 0.25, 0.6])
    assert common_times(expanding_traj, other) == [0.2, 0.6]
    with pytest.raises(UsageError):
        expanding_traj.select([0.25])


def test_resample_onto_smaller_grid(expanding_traj):
    small = build_grid(a=0.8, n_r=24, n_theta=8)
    moved = expanding_traj.resample(small)
    assert moved.grid == small
    np.testing.assert_allclose(moved.at(1.0).values, expanding_hyperbolic(small, 1.0, 1.0).values, atol=1e-4)


def test_bigbang_exact_trajectory_needs_positive_times(unit_radial_grid):
    with pytest.raises(DomainError):
        exact_trajectory("bigbang", unit_radial_grid, [0.0, 0.5])


def test_empty_trajectory_has_no_grid():
    with pytest.raises(UsageError):
        Trajectory([]).grid


# --- persistence --------------------------------------------------------------------

def test_saved_run_loads_back_identically(tmp_path, expanding_metric):
    traj = run(expanding_metric, BoundaryPolicy("constant-curvature"), 0.05,
               FlowConfig(snapshot_times=[0.0, 0.025, 0.05]), metadata={"k": 3})
    save_trajectory(traj, tmp_path / "run")
    assert (tmp_path / "run" / "snapshots" / "snap_0002.rdf").exists()
    loaded = load_trajectory(tmp_path / "run")
    assert list(loaded.times) == list(traj.times)
    np.testing.assert_array_equal(loaded.values, traj.values)
    assert loaded.config == traj.config
    assert loaded.policy == traj.policy
    assert loaded.metadata["k"] == 3
    np.testing.assert_array_equal(loaded.diagnostics["dt"].to_numpy(), traj.diagnostics["dt"].to_numpy())


def test_manifest_layout(tmp_path, expanding_traj):
    save_trajectory(expanding_traj, tmp_path / "exact")
    manifest = json.loads((tmp_path / "exact" / "manifest.json").read_text())
    assert manifest["format_version"] == 1
    assert manifest["grid"]["n_r"] == 64
    assert manifest["snapshots"][1] == {"index": 1, "t": 0.1, "file": "snapshots/snap_0001.rdf"}
    assert manifest["metadata"]["exact"] == "expanding"


def test_loading_a_missing_trajectory(tmp_path):
    with pytest.raises(UsageError):
        load_trajectory(tmp_path / "nowhere")
