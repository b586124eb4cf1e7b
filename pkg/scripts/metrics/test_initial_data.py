import numpy as np
import pytest

from scripts.common.errors import ConfigError, GenerationError, PreconditionError
from scripts.grid.disc_grid import build_grid
from scripts.grid.fields import ScalarField
from scripts.metrics import initial_data
from scripts.metrics.conformal import ConformalMetric, bigbang_factor, gauss_curvature
from scripts.metrics.cutoff import CutoffSpec, psi, psi_prime, psi_second
from scripts.metrics.initial_data import (
    exhaustion_grid,
    hk_factor,
    initial_metric,
    parse_initial_descriptor,
    restrict_metric,
    sample_initial,
    smoothed_max_initial,
)

ETA = 0.1
SPEC = CutoffSpec(ETA)


# --- cutoff -------------------------------------------------------------------

def test_psi_branch_values():
    assert psi(-2 * ETA, SPEC) == 0.0
    assert psi_prime(-2 * ETA, SPEC) == 0.0
    assert psi(2 * ETA, SPEC) == 2 * ETA
    assert psi_prime(2 * ETA, SPEC) == 1.0
    assert psi(0.0, SPEC) == pytest.approx(ETA / 4)


def test_psi_properties_on_a_dense_sample():
    s = np.linspace(-3 * ETA, 3 * ETA, 2001)
    values = psi(s, SPEC)
    assert np.all(values >= s - 1e-15)
    assert np.all(values >= 0.0)
    assert np.all(values <= np.maximum(s, 0.0) + ETA / 4 + 1e-15)
    slope = psi_prime(s, SPEC)
    assert np.all((slope >= 0.0) & (slope <= 1.0))
    assert np.all(psi_second(s, SPEC) >= 0.0)


def test_psi_is_c1_at_the_branch_points():
    for s0 in (-ETA, ETA):
        left, right = s0 - 1e-9, s0 + 1e-9
        assert psi(left, SPEC) == pytest.approx(psi(right, SPEC), abs=1e-8)
        assert psi_prime(left, SPEC) == pytest.approx(psi_prime(right, SPEC), abs=1e-7)


def test_cutoff_width_must_be_positive():
    with pytest.raises(ConfigError):
        CutoffSpec(0.0)


# --- descriptors and samples ------------------------------------------------------

def test_parse_descriptor():
    assert parse_initial_descriptor("restricted-hyperbolic:R=2.0") == ("restricted-hyperbolic", {"R": 2.0})
    assert parse_initial_descriptor("complete-hyperbolic") == ("complete-hyperbolic", {})
    assert parse_initial_descriptor("scaled-flat-like:R=3, amp=0.2") == ("scaled-flat-like", {"R": 3.0, "amp": 0.2})


@pytest.mark.parametrize("text", ["", "sphere", "restricted-hyperbolic:R", "restricted-hyperbolic:R=abc"])
def test_bad_descriptors_raise_config_error(text):
    with pytest.raises(ConfigError):
        parse_initial_descriptor(text)


def test_unknown_sample_parameter_is_rejected():
    grid = build_grid(a=1.0, n_r=32, n_theta=1)
    with pytest.raises(ConfigError):
        sample_initial("restricted-hyperbolic", grid, {"S": 2.0})


def test_restricted_hyperbolic_sample():
    grid = build_grid(a=1.0, n_r=64, n_theta=8)
    m = sample_initial("restricted-hyperbolic", grid, {"R": 2.0})
    assert m.u.values[0] == pytest.approx(0.0, abs=1e-15)
    assert m.complete is False
    K = gauss_curvature(m)
    np.testing.assert_allclose(K.values[grid.check_mask()], -1.0, rtol=1e-3)


def test_complete_hyperbolic_is_bigbang_at_half():
    grid = build_grid(a=1.0, n_r=64, n_theta=1)
    m = sample_initial("complete-hyperbolic", grid)
    assert m.complete is True
    assert m.u.equals(bigbang_factor(grid, 0.5))


def test_scaled_flat_like_keeps_curvature_below_minus_one():
    grid = build_grid(a=1.0, n_r=48, n_theta=16)
    m = sample_initial("scaled-flat-like", grid, {"R": 2.0, "amp": 0.5, "quad": 0.5})
    K = gauss_curvature(m).values[grid.check_mask()]
    assert K.max() <= -1.0 + 1e-2
    base = sample_initial("restricted-hyperbolic", grid, {"R": 2.0})
    assert np.all(m.u.values <= base.u.values + 1e-12)


def test_scaled_flat_like_rejects_positive_perturbation():
    grid = build_grid(a=1.0, n_r=32, n_theta=8)
    with pytest.raises(ConfigError):
        sample_initial("scaled-flat-like", grid, {"R": 2.0, "amp": 0.1, "quad": 1.0})


def test_generation_error_when_sample_breaks_curvature_bound(monkeypatch):
    grid = build_grid(a=1.0, n_r=32, n_theta=1)
    monkeypatch.setattr(initial_data, "hyperbolic_factor", lambda g, a, c: ScalarField.constant(g, 0.0))
    with pytest.raises(GenerationError):
        sample_initial("restricted-hyperbolic", grid, {"R": 2.0})


def test_restricted_hyperbolic_needs_R_above_one():
    grid = build_grid(a=1.0, n_r=32, n_theta=1)
    with pytest.raises(ConfigError):
        sample_initial("restricted-hyperbolic", grid, {"R": 0.9})


def test_reference_descriptors_resolve():
    grid = build_grid(a=1.0, n_r=32, n_theta=1)
    assert initial_metric("bigbang:t=0.5", grid).u.equals(bigbang_factor(grid, 0.5))
    assert initial_metric("flat", grid).ring_curvature == 0.0


def test_restrict_metric_reevaluates_descriptor():
    grid = build_grid(a=1.0, n_r=32, n_theta=1)
    sub = exhaustion_grid(grid, 4)
    m = restrict_metric(sample_initial("restricted-hyperbolic", grid), sub)
    assert m.grid == sub
    np.testing.assert_allclose(m.u.values, np.log(4.0 / (4.0 - sub.node_r**2)), atol=1e-14)


# --- smoothed maximum ------------------------------------------------------------

@pytest.fixture
def base_grid():
    return build_grid(a=1.0, n_r=64, n_theta=1)


def test_smoothed_max_branches(base_grid):
    u0 = sample_initial("restricted-hyperbolic", base_grid)
    bar = smoothed_max_initial(u0, 4, SPEC)
    grid = bar.grid
    hk = hk_factor(grid, 4).values
    u0k = restrict_metric(u0, grid).u.values
    gap = hk - u0k
    upper = gap >= ETA
    lower = gap <= -ETA
    assert upper.any() and lower.any()
    np.testing.assert_allclose(bar.u.values[upper], hk[upper], rtol=0, atol=1e-13)
    np.testing.assert_array_equal(bar.u.values[lower], u0k[lower])
    assert np.all(bar.u.values >= u0k)
    assert np.all(bar.u.values >= hk - 1e-14)
    envelope = np.maximum(u0k, hk)
    assert np.all(bar.u.values <= envelope + ETA / 4 + 1e-14)
    assert np.all(bar.u.values >= envelope - ETA / 4 - 1e-14)


def test_smoothed_max_curvature_bound(base_grid):
    u0 = sample_initial("restricted-hyperbolic", base_grid)
    for k in (2, 8):
        bar = smoothed_max_initial(u0, k, SPEC, grid=exhaustion_grid(base_grid, k, n_r=128))
        K = gauss_curvature(bar).values[bar.grid.check_mask()]
        h = bar.grid.check_spacing(0.8 * bar.grid.r_max)
        assert K.max() <= -np.exp(-2 * ETA) + 10 * h**2 * (1 + np.abs(K).max())


def test_smoothed_max_decreases_in_k(base_grid):
    u0 = sample_initial("restricted-hyperbolic", base_grid)
    common = build_grid(a=0.6, n_r=24, n_theta=1)
    previous = None
    for k in (2, 3, 4, 8, 16):
        bar = smoothed_max_initial(u0, k, SPEC, grid=common).u.values
        if previous is not None:
            assert np.all(bar <= previous + 1e-14)
        previous = bar


def test_smoothed_max_rejects_initial_data_above_minus_one(base_grid):
    flat = ConformalMetric(ScalarField.constant(base_grid, 0.0))
    with pytest.raises(PreconditionError) as info:
        smoothed_max_initial(flat, 2, SPEC)
    assert "r=" in str(info.value)
