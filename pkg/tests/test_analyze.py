import math

import numpy as np
import pytest

from hy_leadlag.analyze import (
    montecarlo_table,
    prop1_moments,
    rate_study,
    realized_volatility,
    signature_plot,
    subsample,
    table_grid,
)
from hy_leadlag.errors import InvalidInputError
from hy_leadlag.models import BachelierParams, Synchronous, TickSeries, UniformRandom
from hy_leadlag.simulate import sample, simulate_bachelier

EVERY_MS = Synchronous(period=1_000)


def _table_params(rho=0.75, **kwargs):
    return BachelierParams.from_units(theta="0.1", T=1, delta=1, rho=rho, **kwargs)


def test_table_grid_around_theta():
    params = _table_params()
    grid = table_grid(params, 1_000)
    assert len(grid) == 101
    assert grid.shifts[0] == 50_000
    assert grid.shifts[-1] == 150_000
    assert not grid.contains_zero


def test_table_grid_full_range():
    params = _table_params()
    grid = table_grid(params, 1_000, full=True)
    assert grid.shifts[0] == -999_000
    assert grid.shifts[-1] == 999_000
    assert grid.contains_zero


def test_montecarlo_is_reproducible():
    params = _table_params()
    grid = table_grid(params, 1_000, half_steps=5)
    first = montecarlo_table(params, EVERY_MS, EVERY_MS, grid, 6, seed=3)
    second = montecarlo_table(params, EVERY_MS, EVERY_MS, grid, 6, seed=3)
    assert first.estimates == second.estimates
    assert first.histogram == second.histogram
    assert sum(first.histogram.values()) == 6
    assert first.config["seed"] == 3
    assert first.config["grid"]["size"] == 11


def test_montecarlo_workers_do_not_change_results():
    params = _table_params()
    grid = table_grid(params, 1_000, half_steps=5)
    serial = montecarlo_table(params, EVERY_MS, EVERY_MS, grid, 8, seed=1)
    parallel = montecarlo_table(params, EVERY_MS, EVERY_MS, grid, 8, seed=1, workers=2)
    assert serial.estimates == parallel.estimates


def test_montecarlo_rejects_bad_input():
    params = _table_params()
    grid = table_grid(params, 1_000, half_steps=5)
    with pytest.raises(InvalidInputError):
        montecarlo_table(params, EVERY_MS, EVERY_MS, grid, 0, seed=1)


@pytest.mark.slow
@pytest.mark.parametrize("rho", [0.75, 0.5, 0.25])
def test_fine_grid_finds_theta(rho):
    params = _table_params(rho=rho)
    report = montecarlo_table(params, EVERY_MS, EVERY_MS, table_grid(params, 1_000), 300, seed=0)
    assert report.count(100_000) >= 295


@pytest.mark.slow
def test_moderate_grid_between_lattice_points():
    # a grid point strictly between two lattice points sums both neighbours
    params = _table_params()
    grid = table_grid(params, 3_000, anchor=500)
    report = montecarlo_table(params, EVERY_MS, EVERY_MS, grid, 300, seed=0)
    assert report.count(99_500) >= 295


@pytest.mark.slow
def test_coarse_grid_between_lattice_points():
    params = _table_params()
    grid = table_grid(params, 6_000, anchor=3_500)
    assert 99_500 in grid
    report = montecarlo_table(params, EVERY_MS, EVERY_MS, grid, 300, seed=0)
    assert report.count(99_500) >= 290


@pytest.mark.slow
def test_moderate_grid_on_lattice_misses_theta():
    params = _table_params()
    report = montecarlo_table(params, EVERY_MS, EVERY_MS, table_grid(params, 3_000), 300, seed=0)
    assert report.count(99_000) < 100
    assert report.count(100_000) == 0


@pytest.mark.slow
def test_uniform_sampling_concentrates_near_theta():
    params = _table_params()
    scheme = UniformRandom(count=300, base_mesh=1_000, span_end=1_000_000)
    report = montecarlo_table(params, scheme, scheme, table_grid(params, 1_000), 300, seed=0)
    assert report.count_between(99_000, 105_000) >= 270
    assert report.count(100_000) + report.count(101_000) >= 170
    assert report.mode in (99_000, 100_000, 101_000)


@pytest.mark.slow
def test_small_correlation_loses_theta():
    params = _table_params(rho=0.0316)
    report = montecarlo_table(params, EVERY_MS, EVERY_MS, table_grid(params, 1_000), 100, seed=0)
    assert report.count(100_000) < 50


@pytest.mark.slow
def test_moments_at_theta():
    params = _table_params()
    check = prop1_moments(params, shift=100_000, n_sims=2_000, seed=0)
    assert check.predicted_mean == pytest.approx(0.75)
    assert check.predicted_var == pytest.approx(1.5625e-3)
    assert abs(check.empirical_mean - check.predicted_mean) <= 3 * check.mean_se
    assert check.empirical_var == pytest.approx(check.predicted_var, rel=0.10)
    assert abs(check.adjacent_cov) <= 3 * check.adjacent_cov_se


def test_moments_off_theta_small():
    params = _table_params()
    check = prop1_moments(params, shift=101_000, n_sims=50, seed=0)
    assert check.predicted_mean == 0.0
    assert check.predicted_var == pytest.approx(1e-3)
    assert check.n_sims == 50


@pytest.mark.parametrize("shift", [100_500, 102_000])
def test_moments_need_lattice_shift_near_theta(shift):
    with pytest.raises(InvalidInputError):
        prop1_moments(_table_params(), shift=shift, n_sims=10, seed=0)


def test_moments_arithmetic_only():
    params = _table_params(exponentiate=True)
    with pytest.raises(InvalidInputError, match="arithmetic"):
        prop1_moments(params, shift=100_000, n_sims=10, seed=0)


@pytest.mark.slow
def test_error_shrinks_with_sampling_period():
    params = BachelierParams.from_units(theta="0.1005", T=1, delta=1, rho=0.75, sim_mesh="0.0001")
    rows = rate_study(params, [4_000, 2_000, 1_000], n_runs=100, seed=0, theta_jitter=4_000)
    errors = [row.median_abs_error for row in rows]
    assert errors[0] > errors[1] > errors[2]
    assert [row.delta_n for row in rows] == [4_000, 2_000, 1_000]


def test_rate_study_rejects_empty():
    with pytest.raises(InvalidInputError):
        rate_study(_table_params(), [], n_runs=1)


def test_rate_study_small():
    rows = rate_study(_table_params(), [2_000, 1_000], n_runs=3, seed=5)
    assert len(rows) == 2
    assert all(row.n_runs == 3 for row in rows)
    assert all(row.median_abs_error >= 0 for row in rows)


@pytest.fixture
def brownian_ticks():
    params = BachelierParams.from_units(theta=0, T="0.9", delta="0.1", rho=0.5, sim_mesh="0.00001")
    paths = simulate_bachelier(params, 17)
    scheme = Synchronous(period=params.sim_mesh)
    x, _ = sample(paths, scheme, scheme, 17)
    return x


def test_signature_plot_is_flat_for_brownian_ticks(brownian_ticks):
    assert len(brownian_ticks) == 100_001
    plot = signature_plot(brownian_ticks, [1, 2, 5, 10, 20])
    base = plot.realized_vols[0]
    assert base == pytest.approx(1.0, rel=0.05)
    for value in plot.realized_vols:
        assert value == pytest.approx(base, rel=0.15)


def test_signature_plot_sorts_ks(brownian_ticks):
    plot = signature_plot(brownian_ticks, [10, 1, 10, 3])
    assert plot.ks.tolist() == [1, 3, 10]


def test_subsample():
    series = TickSeries(label="X", times=np.arange(10), prices=np.arange(10.0))
    assert subsample(series, 1) is series
    assert subsample(series, 3).times.tolist() == [0, 3, 6, 9]
    with pytest.raises(InvalidInputError):
        subsample(series, 0)
    with pytest.raises(InvalidInputError):
        subsample(series, 10)


@pytest.mark.parametrize("a, b", [(1, 4), (2, 3), (5, 5), (7, 11), (10, 10)])
def test_subsample_composes(a, b):
    n = 1_000
    series = TickSeries(label="X", times=np.arange(n) * 7, prices=np.linspace(0.0, 1.0, n))
    twice = subsample(subsample(series, a), b)
    assert len(twice) == math.ceil(n / (a * b))
    assert np.array_equal(twice.times, subsample(series, a * b).times)


def test_realized_volatility():
    series = TickSeries(label="X", times=[0, 1, 2, 3], prices=[1.0, 2.0, 0.0, 1.0])
    assert realized_volatility(series) == 6.0
