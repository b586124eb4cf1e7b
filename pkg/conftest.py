"""Shared pytest fixtures. Lives at the project root so `scripts` and `disc_config` import as in the runners."""

import pytest

from scripts.grid.disc_grid import build_grid
from scripts.metrics.initial_data import initial_metric, sample_initial


@pytest.fixture
def unit_radial_grid():
    return build_grid(a=1.0, n_r=64, n_theta=1)


@pytest.fixture
def small_polar_grid():
    return build_grid(a=1.0, n_r=24, n_theta=8)


@pytest.fixture
def expanding_metric(unit_radial_grid):
    return initial_metric("expanding-hyperbolic", unit_radial_grid)


@pytest.fixture
def restricted_metric(unit_radial_grid):
    return sample_initial("restricted-hyperbolic", unit_radial_grid, {"R": 2.0})


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    """Fresh output root; RICCI_DISC_OUT points at it for the CLI."""
    root = tmp_path / "results"
    monkeypatch.setenv("RICCI_DISC_OUT", str(root))
    return root
