"""
The shifted Hayashi-Yoshida contrast and the grid-maximization estimator.

All timestamps are integer ticks, so the half-open overlap test between
(lo, hi] intervals is exact at shared endpoints.
"""
from __future__ import annotations

import concurrent.futures
import logging
import typing as t

import numpy as np

from .errors import InvalidInputError
from .models import (
    ContrastCurve,
    IntervalFamily,
    LeadLagEstimate,
    ShiftGrid,
    TickSeries,
    same_resolution,
)
from .utils import format_ticks


logger = logging.getLogger(__name__)

Interval = t.Tuple[int, int]


def build_intervals(series: TickSeries) -> IntervalFamily:
    """Map a tick series to its intervals (t_k, t_k+1] and price increments."""
    if len(series) < 2:
        raise InvalidInputError(f"{series.label}: need at least 2 ticks")
    return IntervalFamily(
        lo=series.times[:-1],
        hi=series.times[1:],
        increments=np.diff(series.prices),
        resolution=series.resolution,
        label=series.label,
    )


def mesh_delta(x: IntervalFamily, y: IntervalFamily) -> int:
    """Delta_n: the longest interval across both families."""
    same_resolution(x, y)
    return int(max(x.lengths.max(), y.lengths.max()))


def overlaps(a: Interval, b: Interval) -> bool:
    """True iff the half-open intervals (a0, a1] and (b0, b1] intersect."""
    return max(a[0], b[0]) < min(a[1], b[1])


def ordered_sum(products: np.ndarray) -> float:
    """Left-to-right accumulation (np.cumsum never reorders, unlike np.sum)."""
    if len(products) == 0:
        return 0.0
    return float(np.cumsum(products)[-1])


def check_horizon(x: IntervalFamily, y: IntervalFamily, horizon_T: int) -> None:
    end = min(x.span[1], y.span[1])
    if horizon_T > end:
        raise InvalidInputError(
            f"horizon {format_ticks(horizon_T, x.resolution)} exceeds the data span "
            f"ending at {format_ticks(end, x.resolution)}"
        )


def overlap_pairs(
    x: IntervalFamily, y: IntervalFamily, shift: int, horizon_T: int
) -> t.Tuple[np.ndarray, np.ndarray]:
    """
    Index pairs (i, j) entering the contrast at `shift`, ordered by i then j.

    For shift >= 0 only intervals of x ending by the horizon take part; for
    shift < 0 only intervals of y do. Pair (i, j) is kept when x's i-th
    interval meets y's j-th interval moved back by `shift`. Both families are
    sorted partitions of time, so for each i the partners form one contiguous
    run of j found by a merge of the boundary arrays.
    """
    if shift >= 0:
        n_rows = int(np.searchsorted(x.hi, horizon_T, side="right"))
        j_cap = len(y)
    else:
        n_rows = len(x)
        j_cap = int(np.searchsorted(y.hi, horizon_T, side="right"))
    moved_lo = y.lo - shift
    moved_hi = y.hi - shift
    j_start = np.searchsorted(moved_hi, x.lo[:n_rows], side="right")
    j_end = np.minimum(np.searchsorted(moved_lo, x.hi[:n_rows], side="left"), j_cap)
    counts = np.clip(j_end - j_start, 0, None)
    total = int(counts.sum())
    if total == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    rows = np.repeat(np.arange(n_rows, dtype=np.int64), counts)
    run_starts = np.cumsum(counts) - counts
    cols = np.arange(total, dtype=np.int64) - np.repeat(run_starts - j_start, counts)
    return rows, cols


def hy_contrast(x: IntervalFamily, y: IntervalFamily, shift: int, horizon_T: int) -> float:
    """
    Shifted Hayashi-Yoshida contrast U^n(shift).

    Sums X(I) * Y(J) over pairs of intervals that overlap once J is moved back
    by `shift`, accumulated in ascending I then ascending J order.

    Args:
        x: intervals of the first asset (X)
        y: intervals of the second asset (Y)
        shift: candidate lead-lag in ticks; positive means X leads
        horizon_T: intervals of X (shift >= 0) or of Y (shift < 0) ending after
            this tick are excluded entirely

    Raises:
        InvalidInputError: mixed resolutions or a horizon past either span
    """
    same_resolution(x, y)
    check_horizon(x, y, horizon_T)
    rows, cols = overlap_pairs(x, y, int(shift), int(horizon_T))
    return ordered_sum(x.increments[rows] * y.increments[cols])


def synchronous_contrast(x: TickSeries, y: TickSeries, k: int) -> float:
    """
    Empirical covariation C_n(k) of X increments against Y increments k steps ahead.

    Both series must share the same equispaced timestamps.
    """
    same_resolution(x, y)
    if not np.array_equal(x.times, y.times):
        raise InvalidInputError("synchronous_contrast needs identical timestamps")
    steps = np.diff(x.times)
    if np.any(steps != steps[0]):
        raise InvalidInputError("synchronous_contrast needs equispaced timestamps")
    dx = np.diff(x.prices)
    dy = np.diff(y.prices)
    n = len(dx)
    if abs(k) >= n:
        return 0.0
    if k >= 0:
        return ordered_sum(dx[: n - k] * dy[k:])
    return ordered_sum(dx[-k:] * dy[: n + k])


def default_horizon(x_end: int, y_end: int, grid: ShiftGrid) -> int:
    """Common end of the data less the widest shift, kept positive."""
    horizon = min(x_end, y_end) - grid.max_abs_shift
    if horizon <= 0:
        logger.warning(
            f"data end {min(x_end, y_end)} is within the widest shift "
            f"{grid.max_abs_shift}; clamping the horizon to one tick"
        )
        horizon = 1
    return horizon


def contrast_curve(
    x: IntervalFamily,
    y: IntervalFamily,
    grid: ShiftGrid,
    horizon_T: int,
    workers: t.Optional[int] = None,
) -> ContrastCurve:
    """
    Evaluate the contrast at every grid shift.

    Args:
        workers: evaluate shifts on a thread pool of this size; results are
            gathered in grid order so the curve does not depend on it
    """
    resolution = same_resolution(x, y, grid)
    check_horizon(x, y, horizon_T)
    shifts = [int(s) for s in grid.shifts]

    def evaluate(shift: int) -> float:
        return hy_contrast(x, y, shift, horizon_T)

    if workers is not None and workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(evaluate, shifts))
    else:
        values = [evaluate(shift) for shift in shifts]
    logger.debug(f"evaluated {len(shifts)} shifts up to horizon {horizon_T}")
    return ContrastCurve(shifts=grid.shifts, values=values, resolution=resolution)


def estimate_leadlag(
    x: TickSeries,
    y: TickSeries,
    grid: ShiftGrid,
    horizon_T: t.Optional[int] = None,
    workers: t.Optional[int] = None,
) -> LeadLagEstimate:
    """
    Estimate the lead-lag as the smallest grid shift maximizing |U^n|.

    Args:
        x: the first asset; a positive estimate means x leads y
        y: the second asset
        grid: candidate shifts
        horizon_T: defaults to the common data end less the widest grid shift
        workers: passed to `contrast_curve`
    """
    resolution = same_resolution(x, y, grid)
    if len(grid) == 0:
        raise InvalidInputError("shift grid is empty")
    fx = build_intervals(x)
    fy = build_intervals(y)
    if horizon_T is None:
        horizon_T = default_horizon(x.end, y.end, grid)
    if not grid.contains_zero:
        logger.warning("shift grid does not contain 0")
    curve = contrast_curve(fx, fy, grid, horizon_T, workers=workers)
    theta_hat = curve.argmax_shift
    if len(grid) > 1 and theta_hat in (int(grid.shifts[0]), int(grid.shifts[-1])):
        logger.warning(
            f"estimate {format_ticks(theta_hat, resolution)} lies on the grid boundary"
        )
    return LeadLagEstimate(
        theta_hat=theta_hat,
        contrast_at_max=curve.argmax_value,
        mesh_delta_n=mesh_delta(fx, fy),
        grid_size=len(grid),
        horizon=int(horizon_T),
        resolution=resolution,
    )
