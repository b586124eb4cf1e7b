import numpy as np
import pytest
import sympy

from scripts.common.errors import ConfigError, DomainError, UsageError
from scripts.grid.disc_grid import build_grid, grid_with_truncation
from scripts.grid.fields import ScalarField, field_reduce, laplacian, laplacian_with_ring, resample


def test_uniform_radii_match_linear_spacing():
    grid = build_grid(a=1.0, n_r=9, n_theta=8, clustering=1.0, collar=0.1)
    np.testing.assert_allclose(grid.radii, np.linspace(0.0, 0.9, 9), atol=1e-15)
    assert grid.radii[1] == pytest.approx(0.1125)
    assert grid.n_nodes == 1 + 8 * 8


def test_clustered_radii_end_exactly_on_truncation_ring():
    grid = build_grid(a=1.0, n_r=9, n_theta=8, clustering=2.0, collar=0.1)
    assert grid.radii[-1] == 0.9
    spacing = np.diff(grid.radii)
    assert np.all(spacing > 0)
    # quadratic clustering: spacing shrinks linearly toward the rim
    assert spacing[-1] < spacing[0] / 10
    np.testing.assert_allclose(spacing[-2] / spacing[-1], 3.0)


def test_max_radius_is_a_times_one_minus_collar():
    grid = build_grid(a=0.5, n_r=65, n_theta=64, clustering=3.0, collar=0.05)
    assert grid.r_max == pytest.approx(0.475)
    assert grid.radii[-1] == grid.r_max


@pytest.mark.parametrize("kwargs", [
    dict(a=0.0, n_r=16, n_theta=8),
    dict(a=1.2, n_r=16, n_theta=8),
    dict(a=1.0, n_r=7, n_theta=8),
    dict(a=1.0, n_r=16, n_theta=4),
    dict(a=1.0, n_r=16, n_theta=8, collar=0.5),
    dict(a=1.0, n_r=16, n_theta=8, collar=0.0),
    dict(a=1.0, n_r=16, n_theta=8, clustering=0.5),
])
def test_parameter_domain_violations_raise_config_error(kwargs):
    with pytest.raises(ConfigError):
        build_grid(**kwargs)


@pytest.mark.parametrize("n_r, n_theta", [(9, 8), (17, 12), (33, 1), (65, 64)])
def test_node_count_is_center_plus_rings(n_r, n_theta):
    grid = build_grid(a=1.0, n_r=n_r, n_theta=n_theta)
    assert grid.n_nodes == 1 + (n_r - 1) * n_theta
    assert grid.x.shape == (grid.n_nodes,)


def test_radial_fast_path_is_allowed():
    grid = build_grid(a=1.0, n_r=32, n_theta=1)
    assert grid.radial
    assert grid.n_nodes == 32


def test_angles_are_uniform():
    grid = build_grid(a=1.0, n_r=16, n_theta=12)
    np.testing.assert_allclose(np.diff(grid.angles), 2 * np.pi / 12)


def test_grid_with_truncation_places_ring_at_radius():
    grid = grid_with_truncation(0.8, n_r=33, n_theta=1)
    assert grid.r_max == pytest.approx(0.8)


# --- Laplacian ----------------------------------------------------------------

def test_laplacian_of_r_squared_is_four():
    grid = build_grid(a=1.0, n_r=24, n_theta=16, clustering=1.5, collar=0.02)
    f = ScalarField.from_function(grid, lambda r, th: r**2)
    lap = laplacian(f)
    np.testing.assert_allclose(lap.values[grid.interior_mask], 4.0, atol=1e-8)
    assert np.all(lap.values[grid.ring_mask] == 0.0)


def test_laplacian_annihilates_constants():
    grid = build_grid(a=1.0, n_r=16, n_theta=8)
    lap = laplacian(ScalarField.constant(grid, 2.5))
    np.testing.assert_allclose(lap.values, 0.0, atol=1e-9)


def test_laplacian_annihilates_affine_functions():
    grid = build_grid(a=1.0, n_r=20, n_theta=16, clustering=1.5)
    f = ScalarField(grid, 0.7 * grid.x - 1.3 * grid.y + 2.0)
    lap = laplacian(f)
    np.testing.assert_allclose(lap.values[grid.interior_mask], 0.0, atol=1e-8)


def test_laplacian_exact_on_nonradial_quadratic():
    grid = build_grid(a=1.0, n_r=20, n_theta=16)
    f = ScalarField(grid, grid.x**2 + 3 * grid.x * grid.y)
    lap = laplacian(f)
    np.testing.assert_allclose(lap.values[grid.interior_mask], 2.0, atol=1e-7)


def test_hyperbolic_laplacian_identity_symbolically():
    r = sympy.symbols("r", positive=True)
    f = sympy.log(2 / (1 - r**2))
    polar_laplacian = sympy.diff(f, r, 2) + sympy.diff(f, r) / r
    assert sympy.simplify(polar_laplacian - 4 / (1 - r**2) ** 2) == 0
    assert sympy.simplify(polar_laplacian - sympy.exp(2 * f)) == 0


def test_laplacian_of_hyperbolic_factor_is_close():
    grid = build_grid(a=1.0, n_r=128, n_theta=1, clustering=1.5, collar=0.02)
    f = ScalarField.from_function(grid, lambda r, th: np.log(2.0 / (1.0 - r**2)))
    exact = 4.0 / (1.0 - grid.node_r**2) ** 2
    lap = laplacian(f)
    mask = grid.check_mask()
    rel = np.abs(lap.values[mask] - exact[mask]) / exact[mask]
    assert rel.max() < 5e-3


def test_laplacian_converges_at_second_order():
    errors, spacings = [], []
    for n_r in (16, 32, 64, 128):
        grid = build_grid(a=1.0, n_r=n_r, n_theta=1, clustering=2.0, collar=0.1)
        f = ScalarField.from_function(grid, lambda r, th: np.exp(r**2))
        exact = (4.0 + 4.0 * grid.node_r**2) * np.exp(grid.node_r**2)
        lap = laplacian(f)
        mask = grid.interior_mask
        errors.append(np.max(np.abs(lap.values[mask] - exact[mask])))
        spacings.append(np.max(grid.radial_spacing))
    slope = np.polyfit(np.log(spacings), np.log(errors), 1)[0]
    assert slope >= 1.8


def test_ring_laplacian_is_flagged_and_close():
    grid = build_grid(a=1.0, n_r=64, n_theta=8, clustering=1.0, collar=0.1)
    f = ScalarField.from_function(grid, lambda r, th: r**2)
    lap = laplacian_with_ring(f)
    assert not lap.ring_trusted
    np.testing.assert_allclose(lap.values, 4.0, atol=1e-6)


# --- resample -----------------------------------------------------------------

def test_resample_constant_is_exact():
    source = build_grid(a=1.0, n_r=16, n_theta=8)
    target = build_grid(a=0.7, n_r=23, n_theta=12, clustering=1.0)
    out = resample(ScalarField.constant(source, 3.0), target)
    np.testing.assert_allclose(out.values, 3.0, atol=1e-12)


def test_resample_r_squared_to_finer_grid():
    source = build_grid(a=1.0, n_r=16, n_theta=8)
    target = build_grid(a=0.9, n_r=40, n_theta=16, clustering=1.2)
    f = ScalarField.from_function(source, lambda r, th: r**2)
    out = resample(f, target)
    np.testing.assert_allclose(out.values, target.node_r**2, atol=1e-12)


def test_resample_identity_is_bitwise():
    grid = build_grid(a=1.0, n_r=16, n_theta=8)
    f = ScalarField.from_function(grid, lambda r, th: np.sin(r) * np.cos(th))
    assert resample(f, grid).equals(f)


def test_resample_quadratic_in_xy():
    source = build_grid(a=1.0, n_r=32, n_theta=32)
    target = build_grid(a=0.8, n_r=20, n_theta=24, clustering=1.0)
    f = ScalarField(source, source.x**2 - 0.5 * source.x * source.y + source.y)
    out = resample(f, target)
    exact = target.x**2 - 0.5 * target.x * target.y + target.y
    np.testing.assert_allclose(out.values, exact, atol=1e-3)


def test_resample_radial_to_polar_broadcasts():
    source = build_grid(a=1.0, n_r=32, n_theta=1)
    target = build_grid(a=0.8, n_r=16, n_theta=8)
    out = resample(ScalarField.from_function(source, lambda r, th: r**2), target)
    np.testing.assert_allclose(out.values, target.node_r**2, atol=1e-12)


def test_resample_outside_source_domain_raises():
    source = build_grid(a=0.5, n_r=16, n_theta=8)
    target = build_grid(a=1.0, n_r=16, n_theta=8)
    with pytest.raises(DomainError):
        resample(ScalarField.constant(source, 1.0), target)


# --- reductions and field algebra ----------------------------------------------

def test_field_reductions():
    grid = build_grid(a=1.0, n_r=16, n_theta=8)
    assert field_reduce(ScalarField.constant(grid, 3.0), "max") == 3.0
    assert field_reduce(ScalarField.from_function(grid, lambda r, th: r**2), "min") == 0.0
    f = ScalarField.from_function(grid, lambda r, th: np.cos(th) * r)
    assert field_reduce(f - f, "sup-norm") == 0.0
    with pytest.raises(ConfigError):
        field_reduce(f, "median")


def test_fields_reject_non_finite_values():
    grid = build_grid(a=1.0, n_r=16, n_theta=1)
    values = np.zeros(grid.n_nodes)
    values[3] = np.nan
    with pytest.raises(DomainError):
        ScalarField(grid, values)


def test_fields_on_different_grids_do_not_mix():
    f = ScalarField.constant(build_grid(a=1.0, n_r=16, n_theta=1), 1.0)
    g = ScalarField.constant(build_grid(a=0.5, n_r=16, n_theta=1), 1.0)
    with pytest.raises(UsageError):
        f + g


def test_field_values_are_read_only():
    f = ScalarField.constant(build_grid(a=1.0, n_r=16, n_theta=1), 1.0)
    with pytest.raises(ValueError):
        f.values[0] = 2.0
