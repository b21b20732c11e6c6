"""Monte Carlo studies of the estimator and the signature-plot workflow for tick data."""
from __future__ import annotations

import collections
import concurrent.futures
import logging
import math
import typing as t

import numpy as np

from .core import build_intervals, estimate_leadlag, ordered_sum, overlap_pairs
from .errors import InvalidInputError
from .models import (
    BachelierParams,
    MomentCheck,
    MonteCarloReport,
    RateRow,
    SamplingScheme,
    ShiftGrid,
    SignaturePlot,
    Synchronous,
    TickSeries,
)
from .simulate import hat_function, sample, simulate_bachelier
from .utils import derive_seed, format_ticks, stream


logger = logging.getLogger(__name__)

DEFAULT_HALF_STEPS = 50
THETA_JITTER_STREAM = 3


def table_grid(
    params: BachelierParams,
    mesh: int,
    *,
    half_steps: int = DEFAULT_HALF_STEPS,
    full: bool = False,
    anchor: int = 0,
) -> ShiftGrid:
    """
    Grid for reproducing the simulation tables.

    By default `half_steps` meshes either side of the true theta; with `full`
    the whole admissible range (-delta, delta).
    """
    if full:
        return ShiftGrid.regular(
            -params.delta + 1,
            params.delta - 1,
            mesh,
            params.delta,
            anchor=anchor,
            resolution=params.resolution,
        )
    return ShiftGrid.around(
        params.theta,
        mesh,
        half_steps,
        params.delta,
        anchor=anchor,
        resolution=params.resolution,
    )


class _Run(t.NamedTuple):
    params: BachelierParams
    scheme_x: SamplingScheme
    scheme_y: SamplingScheme
    grid: ShiftGrid
    horizon: int
    seed: int


def _estimate_run(run: _Run) -> int:
    paths = simulate_bachelier(run.params, run.seed)
    x, y = sample(paths, run.scheme_x, run.scheme_y, run.seed)
    return estimate_leadlag(x, y, run.grid, run.horizon).theta_hat


def _map_runs(runs: t.Sequence[_Run], workers: t.Optional[int]) -> t.List[int]:
    if workers is not None and workers > 1:
        chunksize = max(1, len(runs) // (4 * workers))
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            # map yields in submission order, i.e. by run index
            return list(pool.map(_estimate_run, runs, chunksize=chunksize))
    return [_estimate_run(run) for run in runs]


def montecarlo_table(
    params: BachelierParams,
    scheme_x: SamplingScheme,
    scheme_y: SamplingScheme,
    grid: ShiftGrid,
    n_runs: int,
    seed: int,
    horizon_T: t.Optional[int] = None,
    workers: t.Optional[int] = None,
) -> MonteCarloReport:
    """
    Repeat simulate -> sample -> estimate and histogram the estimates.

    Run i uses `derive_seed(seed, i)`, so any subset of runs can be replayed
    and the report is identical whatever `workers` is.

    Args:
        horizon_T: contrast horizon, defaults to params.T
        workers: number of worker processes (serial when None or 1)
    """
    if n_runs < 1:
        raise InvalidInputError(f"n_runs must be at least 1, got {n_runs}")
    if grid.resolution != params.resolution:
        raise InvalidInputError("grid and model use different time resolutions")
    horizon = params.T if horizon_T is None else horizon_T
    runs = [
        _Run(params, scheme_x, scheme_y, grid, horizon, derive_seed(seed, i))
        for i in range(n_runs)
    ]
    logger.info(f"running {n_runs} Monte Carlo runs over {len(grid)} shifts")
    estimates = _map_runs(runs, workers)
    config = {
        "params": params.model_dump(),
        "scheme_x": scheme_x.model_dump(),
        "scheme_y": scheme_y.model_dump(),
        "grid": {
            "first": int(grid.shifts[0]),
            "last": int(grid.shifts[-1]),
            "size": len(grid),
            "delta": grid.delta,
        },
        "horizon": horizon,
        "n_runs": n_runs,
        "seed": seed,
    }
    return MonteCarloReport(
        histogram=dict(collections.Counter(estimates)),
        n_runs=n_runs,
        config=config,
        estimates=tuple(estimates),
        resolution=params.resolution,
    )


def prop1_moments(
    params: BachelierParams,
    shift: int,
    n_sims: int,
    seed: int,
    period: t.Optional[int] = None,
) -> MomentCheck:
    """
    Compare the contrast's mean and variance near theta with the closed forms.

    For synchronous sampling with period D and a shift on the sampling
    lattice with |shift - theta| <= D, each X interval meets exactly one
    shifted Y interval and

        mean = s1 s2 T rho phi((shift - theta) / D)
        var  = s1^2 s2^2 T D (1 + rho^2 phi((shift - theta) / D)^2)

    Adjacent terms of the sum are uncorrelated; their covariance is
    estimated as well.
    """
    if params.exponentiate:
        raise InvalidInputError("the closed forms hold for the arithmetic model only")
    if n_sims < 2:
        raise InvalidInputError("need at least 2 simulations to estimate a variance")
    period = params.sim_mesh if period is None else period
    if abs(shift - params.theta) > period:
        raise InvalidInputError(
            f"shift {format_ticks(shift, params.resolution)} is more than one sampling "
            f"period from theta"
        )
    if shift % period:
        raise InvalidInputError("shift must lie on the sampling lattice")

    res = params.resolution
    phi = hat_function((shift - params.theta) / period)
    scale = params.sigma1 * params.sigma2
    term_mean = scale * params.rho * phi * period / res
    predicted_mean = scale * (params.T / res) * params.rho * phi
    predicted_var = scale**2 * (params.T / res) * (period / res) * (1.0 + params.rho**2 * phi**2)

    scheme = Synchronous(period=period)
    contrasts = np.empty(n_sims)
    adjacent = np.empty(n_sims)
    for i in range(n_sims):
        run_seed = derive_seed(seed, i)
        x, y = sample(simulate_bachelier(params, run_seed), scheme, scheme, run_seed)
        fx, fy = build_intervals(x), build_intervals(y)
        rows, cols = overlap_pairs(fx, fy, shift, params.T)
        terms = fx.increments[rows] * fy.increments[cols]
        contrasts[i] = ordered_sum(terms)
        centred = terms - term_mean
        adjacent[i] = float(np.mean(centred[:-1] * centred[1:]))
    logger.info(f"computed {n_sims} contrasts at shift {format_ticks(shift, res)}")
    return MomentCheck(
        shift=shift,
        empirical_mean=float(np.mean(contrasts)),
        empirical_var=float(np.var(contrasts, ddof=1)),
        predicted_mean=float(predicted_mean),
        predicted_var=float(predicted_var),
        n_sims=n_sims,
        adjacent_cov=float(np.mean(adjacent)),
        adjacent_cov_se=float(np.std(adjacent, ddof=1) / math.sqrt(n_sims)),
    )


def rate_study(
    params: BachelierParams,
    deltas: t.Sequence[int],
    grid_mesh_rule: t.Optional[t.Callable[[int], int]] = None,
    n_runs: int = 100,
    seed: int = 0,
    *,
    half_steps: int = DEFAULT_HALF_STEPS,
    theta_jitter: int = 0,
) -> t.List[RateRow]:
    """
    Median |theta_hat - theta| for each synchronous sampling period in `deltas`.

    Every period sees the same simulated paths (run i uses
    `derive_seed(seed, i)`), so rows differ only through the sampling.

    Args:
        grid_mesh_rule: grid mesh for a given period, defaults to the period itself
        theta_jitter: when positive, run i draws its theta uniformly on the
            simulation lattice in [theta, theta + theta_jitter)
    """
    if not deltas:
        raise InvalidInputError("rate_study needs at least one sampling period")
    if n_runs < 1:
        raise InvalidInputError(f"n_runs must be at least 1, got {n_runs}")
    rule = grid_mesh_rule or (lambda period: period)
    grids = [
        ShiftGrid.around(
            params.theta, rule(d), half_steps, params.delta, resolution=params.resolution
        )
        for d in deltas
    ]
    errors: t.List[t.List[int]] = [[] for _ in deltas]
    jitter_steps = theta_jitter // params.sim_mesh
    for i in range(n_runs):
        run_seed = derive_seed(seed, i)
        run_params = params
        if jitter_steps > 0:
            offset = int(stream(run_seed, THETA_JITTER_STREAM).integers(0, jitter_steps))
            run_params = BachelierParams(
                **{**params.model_dump(), "theta": params.theta + offset * params.sim_mesh}
            )
        paths = simulate_bachelier(run_params, run_seed)
        for row, (period, grid) in enumerate(zip(deltas, grids)):
            scheme = Synchronous(period=period)
            x, y = sample(paths, scheme, scheme, run_seed)
            theta_hat = estimate_leadlag(x, y, grid, params.T).theta_hat
            errors[row].append(abs(theta_hat - run_params.theta))
    table = [
        RateRow(delta_n=int(d), median_abs_error=float(np.median(errs)), n_runs=n_runs)
        for d, errs in zip(deltas, errors)
    ]
    for row in table:
        logger.info(
            f"Delta_n={format_ticks(row.delta_n, params.resolution)}: "
            f"median error {row.median_abs_error} ticks"
        )
    return table


def subsample(series: TickSeries, k: int) -> TickSeries:
    """Keep one tick out of k: indices 0, k, 2k, ..."""
    if k < 1:
        raise InvalidInputError(f"subsampling factor must be >= 1, got {k}")
    if k == 1:
        return series
    return TickSeries(
        label=series.label,
        times=series.times[::k],
        prices=series.prices[::k],
        resolution=series.resolution,
    )


def realized_volatility(series: TickSeries) -> float:
    increments = np.diff(series.prices)
    return ordered_sum(increments * increments)


def signature_plot(series: TickSeries, ks: t.Iterable[int]) -> SignaturePlot:
    """Realized volatility of the series subsampled 1-in-k, for each k."""
    ks = sorted(set(int(k) for k in ks))
    if not ks:
        raise InvalidInputError("signature plot needs at least one k")
    vols = [realized_volatility(subsample(series, k)) for k in ks]
    return SignaturePlot(ks=ks, realized_vols=vols)
