import numpy as np
import pytest

from scripts.common.errors import ConfigError, UsageError
from scripts.grid.disc_grid import build_grid
from scripts.metrics.conformal import expanding_hyperbolic
from scripts.flow.trajectory import exact_trajectory
from scripts.verification.report import VerifierReport
from scripts.verification.transforms import (
    supersolution_residual,
    supersolution_transform,
    time_shift_transform,
)


@pytest.fixture(scope="module")
def grid():
    return build_grid(a=1.0, n_r=128, n_theta=1)


@pytest.fixture(scope="module")
def expanding(grid):
    return exact_trajectory("expanding", grid, np.linspace(0.0, 1.0, 21))


@pytest.fixture(scope="module")
def bigbang(grid):
    return exact_trajectory("bigbang", grid, np.linspace(0.5, 1.5, 21))


def test_analytic_supersolution_residual():
    assert supersolution_residual(0.1, 0.0) == pytest.approx(0.05)
    assert supersolution_residual(0.1, 10.0) == pytest.approx(0.025)


def test_time_shift_of_expanding_is_again_a_flow(expanding, grid):
    C, delta = 1.0, 0.1
    shifted = time_shift_transform(expanding, C, delta)
    reports = [VerifierReport.from_dict(item) for item in shifted.metadata["reports"]]
    assert [r.check for r in reports] == ["time shift: flow residual", "time shift: initial lower bound"]
    assert all(r.passed for r in reports)
    assert shifted.times[0] == 0.0
    assert shifted.times[-1] <= 1.0 - delta + 1e-12
    scale = np.exp(-2 * C * delta)
    for state in shifted:
        exact = expanding_hyperbolic(grid, 1.0, scale * (state.t + delta)).values + C * delta
        np.testing.assert_allclose(state.u.values, exact, atol=1e-4)


def test_small_shift_reproduces_the_input(expanding):
    shifted = time_shift_transform(expanding, 1.0, 1e-4)
    for state in shifted:
        np.testing.assert_allclose(state.u.values, expanding.sample(state.t).values, atol=5e-4)


@pytest.mark.parametrize("C, delta", [(1.0, 0.0), (1.0, 1.0), (1.0, -0.1), (-1.0, 0.1)])
def test_time_shift_parameter_domain(expanding, C, delta):
    with pytest.raises(ConfigError):
        time_shift_transform(expanding, C, delta)


def test_time_shift_needs_dense_snapshots(grid):
    sparse_traj = exact_trajectory("expanding", grid, [0.0, 0.5, 1.0])
    with pytest.raises(UsageError):
        time_shift_transform(sparse_traj, 1.0, 0.1)


def test_time_shift_outside_the_recorded_interval(expanding):
    with pytest.raises(UsageError):
        time_shift_transform(expanding, 1.0, 0.1, times=[0.0, 2.0])


@pytest.mark.parametrize("eps", [0.1, 0.01])
def test_supersolution_residual_of_bigbang(bigbang, eps):
    traj, report = supersolution_transform(bigbang, eps)
    assert report.passed
    assert report.details["eps"] == eps
    assert len(traj) == len(bigbang)
    assert traj.metadata["transform"] == "supersolution"
    t = traj.times[0]
    assert traj.times[0] == pytest.approx(np.expm1(eps * 0.5) / eps)
    np.testing.assert_allclose(traj[0].u.values, bigbang[0].u.values + 0.5 * np.log(eps * t + 1), atol=1e-10)


def test_supersolution_needs_positive_eps(bigbang):
    with pytest.raises(ConfigError):
        supersolution_transform(bigbang, 0.0)
