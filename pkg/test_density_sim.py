"""Density event, its bounds, the Landau function and the small tori margin."""

import math

import pytest

import density_sim_module
from density_sim_module import (
    DensityParams,
    GrowthParams,
    bound_density_event,
    density_params,
    density_table,
    exact_density_event,
    first_positive_margin,
    landau_brute_force,
    landau_g,
    landau_ratio,
    landau_table,
    margin_grid,
    persistence_profile,
    primes_upto,
    simulate_density_event,
    small_tori_margin,
    stirling_lower,
)
from errors_module import BudgetExceededError, DensityParamError


def test_params_validation():
    assert DensityParams(c_size=10_000, delta=0.5).draws == 100
    assert DensityParams(c_size=1000, delta=0.5).draws == 31
    for bad in ({"c_size": 0, "delta": 0.5}, {"c_size": 10, "delta": 1.0},
                {"c_size": 10, "delta": 0.5, "f_size": 11}):
        with pytest.raises(DensityParamError):
            density_params(**bad)


def test_exact_value():
    assert exact_density_event(10_000, 0.5, 10) == pytest.approx(0.999 ** 100)
    assert exact_density_event(10_000, 0.5, 10) == pytest.approx(0.9048, abs=1e-4)
    assert exact_density_event(500, 0.5, 0) == 1.0
    assert exact_density_event(500, 0.5, 500) == 0.0


def test_monte_carlo_is_reproducible_and_close():
    params = density_params(c_size=10_000, delta=0.5, f_size=10, trials=20_000, rng_seed=7)
    first = simulate_density_event(params)
    again = simulate_density_event(params)
    assert first.hits == again.hits
    exact = exact_density_event(10_000, 0.5, 10)
    assert abs(first.probability - exact) <= 4 * first.stderr + 1e-3


def test_monte_carlo_extremes():
    none_flagged = simulate_density_event(density_params(c_size=100, delta=0.5, trials=500))
    assert none_flagged.probability == 1.0
    all_flagged = simulate_density_event(density_params(c_size=100, delta=0.5, f_size=100, trials=500))
    assert all_flagged.probability == 0.0
    assert all_flagged.stderr == 0.0


@pytest.mark.parametrize("c", [100, 1000, 10_000, 100_000])
@pytest.mark.parametrize("f", [0, 1, 5, 20])
def test_bound_chain_is_ordered(c, f):
    chain = bound_density_event(density_params(c_size=c, delta=0.5, f_size=f))
    assert chain.nonincreasing
    assert chain.bound1 == pytest.approx(chain.bound2)


def test_bound_with_growth_constant():
    params = density_params(c_size=10_000, delta=0.5, f_size=10)
    chain = bound_density_event(params, const=1.0, alpha=0.3)
    assert chain.nonincreasing
    assert chain.bound2 < chain.bound1
    with pytest.raises(DensityParamError):
        bound_density_event(params, const=1.0, alpha=0.1)
    with pytest.raises(DensityParamError):
        bound_density_event(density_params(c_size=10, delta=0.5, f_size=6))


def test_out_of_order_chain_raises(monkeypatch):
    monkeypatch.setattr(density_sim_module, "exact_density_event", lambda c, delta, f: 0.0)
    with pytest.raises(DensityParamError, match="out of order"):
        bound_density_event(density_params(c_size=1000, delta=0.5, f_size=3))


def test_persistence_grows():
    profile = persistence_profile([10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6], 0.5, 0.3)
    values = [p for _, _, p in profile]
    assert values == sorted(values)
    assert values[0] == pytest.approx(0.804, abs=2e-3)
    assert values[-1] == pytest.approx(0.939, abs=2e-3)


def test_density_table_columns():
    params = density_params(c_size=1000, delta=0.5, f_size=3, trials=1000, rng_seed=1)
    frame = density_table(params)
    assert list(frame.columns) == ["c", "delta", "f", "draws", "exact", "bound1", "bound2",
                                   "empirical", "stderr"]
    assert len(frame) == 1


def test_primes():
    assert primes_upto(1) == []
    assert primes_upto(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_landau_known_values():
    assert [landau_g(p) for p in range(1, 11)] == [1, 2, 3, 4, 6, 6, 12, 15, 20, 30]
    assert landau_g(100) == 232792560


@pytest.mark.parametrize("p", [12, 19, 25, 30])
def test_landau_matches_brute_force(p):
    assert landau_g(p) == landau_brute_force(p)


def test_landau_limits():
    with pytest.raises(DensityParamError):
        landau_g(0)
    with pytest.raises(BudgetExceededError):
        landau_g(10_000)
    with pytest.raises(DensityParamError):
        landau_ratio(1)
    table = landau_table([10, 50, 100])
    assert list(table["g"]) == [30, landau_g(50), 232792560]
    assert all(0.5 < r < 1.5 for r in table["ratio"])


def test_small_tori_margin():
    assert small_tori_margin(GrowthParams(p=10, c_lin=1.0), 0.1) < 0
    assert first_positive_margin(1.0, 0.1) == 59875
    assert first_positive_margin(1.0, 0.1, p_max=1000) is None
    with pytest.raises(DensityParamError):
        small_tori_margin(GrowthParams(p=2, c_lin=1.0), 0.5)
    grid = margin_grid([1.0], [0.1, 0.5])
    assert list(grid["first_p"])[0] == 59875


def test_stirling_lower_bound():
    for p in (1, 5, 50, 170, 1000):
        report = stirling_lower(p)
        assert report.holds
    small = stirling_lower(5)
    assert small.factorial == 120.0
    assert small.bound == pytest.approx((5 / math.e) ** 5)
    assert stirling_lower(1000).factorial is None
