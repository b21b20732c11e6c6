import typing as t

import numpy as np
import pytest

from hy_leadlag.core import build_intervals, overlaps
from hy_leadlag.models import IntervalFamily, TickSeries


def naive_contrast(x: IntervalFamily, y: IntervalFamily, shift: int, horizon: int) -> float:
    """Direct double loop over (I, J), ascending I then ascending J."""
    acc = 0.0
    for i in range(len(x)):
        if shift >= 0 and x.hi[i] > horizon:
            continue
        moved_lo = y.lo - shift
        moved_hi = y.hi - shift
        # vectorized inner test, same half-open rule as `overlaps`
        hit = np.maximum(moved_lo, x.lo[i]) < np.minimum(moved_hi, x.hi[i])
        if shift < 0:
            hit &= y.hi <= horizon
        for j in np.flatnonzero(hit):
            assert overlaps((int(x.lo[i]), int(x.hi[i])), (int(moved_lo[j]), int(moved_hi[j])))
            acc += float(x.increments[i]) * float(y.increments[j])
    return acc


def random_series(
    rng: np.random.Generator, n_ticks: int, *, start: int = 0, stop: int = 5_000, label: str = "X"
) -> TickSeries:
    times = np.sort(rng.choice(np.arange(start, stop), size=n_ticks, replace=False))
    prices = 100.0 + np.cumsum(rng.standard_normal(n_ticks))
    return TickSeries(label=label, times=times, prices=prices)


class Instance(t.NamedTuple):
    x: IntervalFamily
    y: IntervalFamily
    shift: int
    horizon: int


def random_instance(rng: np.random.Generator) -> Instance:
    """Two non-synchronous families with a shift and a valid horizon."""
    x = build_intervals(random_series(rng, int(rng.integers(3, 202)), start=0, label="X"))
    y = build_intervals(
        random_series(rng, int(rng.integers(3, 202)), start=int(rng.integers(0, 300)), label="Y")
    )
    end = min(x.span[1], y.span[1])
    first = max(x.hi[0], y.hi[0])
    horizon = int(rng.integers(min(first, end), end + 1))
    shift = int(rng.integers(-600, 601))
    return Instance(x, y, shift, horizon)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20_240_101)


@pytest.fixture
def oracle() -> t.Callable[[IntervalFamily, IntervalFamily, int, int], float]:
    return naive_contrast


@pytest.fixture
def make_instance() -> t.Callable[[np.random.Generator], Instance]:
    return random_instance
