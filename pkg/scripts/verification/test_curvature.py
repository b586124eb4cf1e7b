import numpy as np
import pytest

from scripts.common.errors import DomainError, UsageError
from scripts.grid.disc_grid import build_grid
from scripts.grid.fields import ScalarField
from scripts.metrics.initial_data import sample_initial
from scripts.flow.schedule import FlowConfig, snapshot_schedule
from scripts.flow.trajectory import FlowState, Trajectory, exact_trajectory
from scripts.construction.exhaustion import approximate_flow, construct_limit
from scripts.construction.plan import ExhaustionPlan
from scripts.verification.curvature import (
    admissibility_report,
    approximate_flow_bounds,
    barrier_fields,
    barrier_report,
    curvature_sandwich,
    ode_curvature_bound,
)

TIMES = np.linspace(0.25, 1.0, 4)


@pytest.fixture(scope="module")
def grid():
    return build_grid(a=1.0, n_r=128, n_theta=1)


@pytest.fixture(scope="module")
def bigbang(grid):
    return exact_trajectory("bigbang", grid, TIMES)


@pytest.fixture(scope="module")
def expanding(grid):
    return exact_trajectory("expanding", grid, np.linspace(0.0, 1.0, 5))


@pytest.fixture
def flat(unit_radial_grid):
    zero = ScalarField.constant(unit_radial_grid, 0.0)
    return Trajectory([FlowState(t, zero) for t in (0.0, 0.5, 1.0)])


def test_admissibility_of_bigbang(bigbang):
    params, report = admissibility_report(bigbang, [0.5])
    assert params.C == pytest.approx(-0.5, rel=1e-2)
    assert params.lower_bound(0.5) == pytest.approx(-1.0, rel=1e-2)
    assert report.passed
    assert report.margin == 0.0
    assert report.details["C"] == params.C


def test_admissibility_of_expanding(expanding):
    params, report = admissibility_report(expanding, [0.5])
    assert params.C == pytest.approx(-1.0 / 3.0, rel=1e-2)
    assert params.C_eps[0.5] == pytest.approx(0.5, rel=1e-2)
    assert report.margin > 0


def test_flat_flow_fails_the_completeness_proxy(flat):
    params, report = admissibility_report(flat, [0.5])
    assert params.C == pytest.approx(0.0, abs=1e-8)
    assert params.C_eps[0.5] == pytest.approx(0.0, abs=1e-8)
    assert not report.passed


def test_admissibility_needs_positive_times(unit_radial_grid):
    traj = exact_trajectory("expanding", unit_radial_grid, [0.0])
    with pytest.raises(UsageError):
        admissibility_report(traj, [0.5])


def test_admissibility_needs_snapshots_after_eps(bigbang):
    with pytest.raises(UsageError):
        admissibility_report(bigbang, [2.0])
    params, _ = admissibility_report(bigbang, [0.5])
    with pytest.raises(DomainError):
        params.lower_bound(0.1)


def test_barriers_are_saturated_by_bigbang(bigbang):
    a, b, c, d = barrier_report(bigbang)
    assert all(r.passed for r in (a, b, c, d))
    assert abs(a.margin) <= a.tolerance
    assert b.margin == 0.0
    assert c.margin > 0
    assert d.details["C"] == pytest.approx(-0.5, rel=1e-2)


def test_upper_barrier_is_saturated_by_expanding(expanding):
    reports = barrier_report(expanding)
    assert [r.check[:11] for r in reports] == ["barrier (A)", "barrier (B)", "barrier (C)", "barrier (D)"]
    assert all(r.passed for r in reports)
    assert reports[2].margin == 0.0


def test_barriers_skip_t_zero_only_trajectories(unit_radial_grid):
    traj = exact_trajectory("expanding", unit_radial_grid, [0.0])
    reports = barrier_report(traj)
    assert len(reports) == 2


def test_barrier_gap_is_closed_form(grid):
    for t in (0.1, 0.5, 2.0):
        lower, upper = barrier_fields(grid, t)
        np.testing.assert_allclose(upper - lower, 0.5 * np.log((2 * t + 1) / (2 * t)), atol=1e-12)


def test_sandwich_sides(bigbang, expanding):
    low = curvature_sandwich(bigbang)
    assert low.passed and low.details["side"] == "lower"
    high = curvature_sandwich(expanding)
    assert high.passed and high.details["side"] == "upper"
    assert high.details["lower_margin"] > 0


def test_flat_flow_breaks_the_sandwich(flat):
    report = curvature_sandwich(flat)
    assert not report.passed
    assert report.details["side"] == "upper"
    assert report.margin == pytest.approx(-1.0 / 2.0, rel=1e-6)


def test_approximate_flow_bounds():
    u0 = sample_initial("restricted-hyperbolic", build_grid(a=1.0, n_r=64, n_theta=1), {"R": 2.0})
    traj = approximate_flow(u0, 2, 0.1, 0.25, FlowConfig(snapshot_times=snapshot_schedule(0.25, 5)))
    upper, lower = approximate_flow_bounds(traj, 0.1)
    assert upper.passed
    assert lower.passed
    assert upper.details["eta"] == 0.1


def test_ode_bound_is_saturated_by_bigbang(bigbang):
    report = ode_curvature_bound(bigbang, 0.5)
    assert report.passed
    assert report.details["C_eps"] == pytest.approx(1.0, rel=1e-2)
    assert abs(report.margin) <= report.tolerance
    with pytest.raises(UsageError):
        ode_curvature_bound(bigbang, 0.3)


# --- construction limit --------------------------------------------------------------

@pytest.fixture(scope="module")
def restricted_limit():
    u0 = sample_initial("restricted-hyperbolic", build_grid(a=1.0, n_r=64, n_theta=1), {"R": 2.0})
    return construct_limit(u0, ExhaustionPlan(n_r=32, limit_tol=1.0)).limit


@pytest.mark.slow
def test_construction_limit_lies_in_the_sandwich(restricted_limit):
    for t in (0.1, 0.5, 1.0):
        assert restricted_limit.index_of(t) is not None
    report = curvature_sandwich(restricted_limit)
    assert report.passed, report.summary_line()


@pytest.mark.slow
def test_construction_limit_respects_all_barriers(restricted_limit):
    reports = barrier_report(restricted_limit)
    assert [r.check for r in reports] == [
        "barrier (A) K >= -1/(2t)",
        "barrier (B) u >= big-bang",
        "barrier (C) u <= expanding hyperbolic",
        "barrier (D) u >= u0 - C t",
    ]
    assert all(r.passed for r in reports), [r.summary_line() for r in reports if not r.passed]
