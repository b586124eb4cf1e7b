import numpy as np
import pytest

from scripts.common.errors import UsageError
from scripts.analysis.convergence_study import convergence_order, exact_solution_error, exact_solution_ladder


def test_order_of_a_clean_power_law():
    hs = np.array([0.1, 0.05, 0.025, 0.0125])
    order, (low, high) = convergence_order(hs, 3.0 * hs ** 2)
    assert order == pytest.approx(2.0, abs=1e-10)
    assert low <= order <= high


def test_order_with_noise_has_a_confidence_interval():
    rng = np.random.default_rng(3)
    hs = np.geomspace(0.2, 0.01, 8)
    errors = hs ** 2 * np.exp(rng.normal(scale=0.05, size=hs.size))
    order, (low, high) = convergence_order(hs, errors)
    assert low < order < high
    assert order == pytest.approx(2.0, abs=0.1)


def test_two_points_fit_exactly():
    order, conf_int = convergence_order([0.1, 0.05], [1e-2, 2.5e-3])
    assert order == pytest.approx(2.0)
    assert conf_int == (order, order)


@pytest.mark.parametrize("hs, errors", [([0.1], [1e-3]), ([0.1, 0.05], [1e-3]), ([0.1, 0.0], [1e-3, 1e-4])])
def test_bad_inputs(hs, errors):
    with pytest.raises(UsageError):
        convergence_order(hs, errors)


def test_single_resolution_error_is_small():
    error, h, steps = exact_solution_error(64, 0.1)
    assert error < 2e-3
    assert 0 < h < 0.1
    assert steps > 0


def test_short_ladder_converges():
    ladder = exact_solution_ladder([32, 64], T=0.1)
    assert list(ladder["n_r"]) == [32, 64]
    assert ladder["error"].iloc[1] < ladder["error"].iloc[0]
    assert ladder.attrs["order"] > 1.4


@pytest.mark.slow
def test_expanding_hyperbolic_ladder_reaches_second_order():
    ladder = exact_solution_ladder([64, 128, 256], T=1.0)
    assert ladder["error"].iloc[-1] <= 1e-3
    assert ladder.attrs["order"] >= 1.8
