import numpy as np
import pytest

from scripts.common.errors import UsageError
from scripts.flow.trajectory import Trajectory, exact_trajectory
from scripts.analysis.plots import plot_curvature_series, plot_radial_profiles
from scripts.analysis.profiles import SERIES_COLUMNS, profile_columns, radial_profiles, time_series


@pytest.fixture
def bigbang(unit_radial_grid):
    return exact_trajectory("bigbang", unit_radial_grid, [0.25, 0.5, 1.0])


def test_radial_profiles_hold_every_node(bigbang):
    frame = radial_profiles(bigbang)
    assert list(frame.columns) == ["t", "r", "theta", "u", "K"]
    assert len(frame) == 3 * bigbang.grid.n_nodes
    half = frame[frame["t"] == 0.5]
    np.testing.assert_allclose(half["u"], np.log(2.0 / (1.0 - half["r"] ** 2)), atol=1e-12)


def test_profile_columns_follow_the_ray(small_polar_grid):
    traj = exact_trajectory("expanding", small_polar_grid, [0.0, 1.0])
    frame = profile_columns(traj)
    assert list(frame.columns) == ["r", "u@0", "K@0", "u@1", "K@1"]
    assert len(frame) == small_polar_grid.n_r
    assert np.all(np.diff(frame["r"]) > 0)


def test_time_series_tracks_bigbang_curvature(bigbang):
    series = time_series(bigbang)
    assert list(series.columns) == SERIES_COLUMNS
    np.testing.assert_allclose(series["max_K"], -1.0 / (2.0 * series["t"]), rtol=1e-2)
    # the metric distance to the ring grows with t
    assert np.all(np.diff(series["radial_distance"]) > 0)


def test_selection_errors(bigbang):
    with pytest.raises(UsageError):
        radial_profiles(bigbang, [0.3])
    with pytest.raises(UsageError):
        time_series(Trajectory([]))


def test_plots_are_written(bigbang, tmp_path):
    assert plot_radial_profiles(profile_columns(bigbang), str(tmp_path / "profiles.png"))
    assert plot_curvature_series(time_series(bigbang), str(tmp_path / "curvature.png"))
    assert (tmp_path / "profiles.png").stat().st_size > 0
