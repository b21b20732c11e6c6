"""Domain types: tick series, interval families, shift grids, parameters and reports."""
from __future__ import annotations

import dataclasses
import logging
import typing as t

import numpy as np
import pydantic

from .errors import InvalidInputError
from .utils import DEFAULT_RESOLUTION, format_ticks, to_ticks


logger = logging.getLogger(__name__)


def _frozen(values: t.Any, dtype: t.Any) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    if arr.ndim != 1:
        raise InvalidInputError(f"expected a one-dimensional array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def _check_resolution(resolution: int) -> None:
    if int(resolution) <= 0:
        raise InvalidInputError(f"resolution must be positive, got {resolution}")


def same_resolution(*items: t.Any) -> int:
    """Return the common resolution of the given containers or raise."""
    resolutions = {int(item.resolution) for item in items}
    if len(resolutions) != 1:
        raise InvalidInputError(f"mixed time resolutions: {sorted(resolutions)}")
    return resolutions.pop()


@dataclasses.dataclass(frozen=True)
class TickSeries:
    """One asset's observation times (ticks) and prices."""

    label: str
    times: np.ndarray
    prices: np.ndarray
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self) -> None:
        _check_resolution(self.resolution)
        times = _frozen(self.times, np.int64)
        prices = _frozen(self.prices, np.float64)
        if len(times) != len(prices):
            raise InvalidInputError(
                f"{self.label}: {len(times)} times but {len(prices)} prices"
            )
        if len(times) < 2:
            raise InvalidInputError(f"{self.label}: need at least 2 ticks, got {len(times)}")
        steps = np.diff(times)
        if np.any(steps <= 0):
            first = int(np.flatnonzero(steps <= 0)[0]) + 1
            raise InvalidInputError(
                f"{self.label}: times must be strictly increasing (index {first})"
            )
        if not np.all(np.isfinite(prices)):
            first = int(np.flatnonzero(~np.isfinite(prices))[0])
            raise InvalidInputError(f"{self.label}: non-finite price at index {first}")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "prices", prices)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def start(self) -> int:
        return int(self.times[0])

    @property
    def end(self) -> int:
        return int(self.times[-1])

    def with_prices(self, prices: t.Any) -> TickSeries:
        return dataclasses.replace(self, prices=prices)


@dataclasses.dataclass(frozen=True)
class IntervalFamily:
    """Contiguous half-open intervals (lo, hi] with the price increment over each."""

    lo: np.ndarray
    hi: np.ndarray
    increments: np.ndarray
    resolution: int = DEFAULT_RESOLUTION
    label: str = ""

    def __post_init__(self) -> None:
        _check_resolution(self.resolution)
        lo = _frozen(self.lo, np.int64)
        hi = _frozen(self.hi, np.int64)
        increments = _frozen(self.increments, np.float64)
        if not (len(lo) == len(hi) == len(increments)):
            raise InvalidInputError("interval bounds and increments differ in length")
        if len(lo) == 0:
            raise InvalidInputError(f"{self.label or 'interval family'} is empty")
        if np.any(lo >= hi):
            raise InvalidInputError("every interval needs lo < hi")
        if np.any(hi[:-1] != lo[1:]):
            raise InvalidInputError("intervals must be contiguous")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "increments", increments)

    def __len__(self) -> int:
        return len(self.lo)

    @property
    def span(self) -> t.Tuple[int, int]:
        return int(self.lo[0]), int(self.hi[-1])

    @property
    def lengths(self) -> np.ndarray:
        return self.hi - self.lo


@dataclasses.dataclass(frozen=True)
class ShiftGrid:
    """Sorted finite set of candidate shifts (ticks)."""

    shifts: np.ndarray
    resolution: int = DEFAULT_RESOLUTION
    delta: t.Optional[int] = None

    def __post_init__(self) -> None:
        _check_resolution(self.resolution)
        shifts = _frozen(self.shifts, np.int64)
        if len(shifts) == 0:
            raise InvalidInputError("shift grid is empty")
        if np.any(np.diff(shifts) <= 0):
            raise InvalidInputError("shift grid must be strictly increasing")
        if self.delta is not None:
            if self.delta <= 0:
                raise InvalidInputError(f"delta must be positive, got {self.delta}")
            outside = shifts[np.abs(shifts) >= self.delta]
            if len(outside):
                raise InvalidInputError(
                    f"shift {format_ticks(outside[0], self.resolution)} lies outside "
                    f"(-delta, delta) with delta={format_ticks(self.delta, self.resolution)}"
                )
        object.__setattr__(self, "shifts", shifts)

    def __len__(self) -> int:
        return len(self.shifts)

    def __contains__(self, shift: object) -> bool:
        return bool(np.any(self.shifts == shift))

    @property
    def contains_zero(self) -> bool:
        return 0 in self

    @property
    def max_abs_shift(self) -> int:
        return int(np.max(np.abs(self.shifts)))

    @classmethod
    def regular(
        cls,
        lo: int,
        hi: int,
        mesh: int,
        delta: int,
        *,
        anchor: int = 0,
        include_zero: bool = True,
        resolution: int = DEFAULT_RESOLUTION,
    ) -> ShiftGrid:
        """
        Build the points `anchor + k * mesh` lying in [lo, hi].

        This is the default grid builder: 0 is added when `include_zero` is set,
        and every point must lie strictly inside (-delta, delta).
        """
        if mesh <= 0:
            raise InvalidInputError(f"grid mesh must be positive, got {mesh}")
        if lo > hi:
            raise InvalidInputError("grid lower bound exceeds upper bound")
        k_min = -((anchor - lo) // mesh)
        k_max = (hi - anchor) // mesh
        shifts = anchor + mesh * np.arange(k_min, k_max + 1, dtype=np.int64)
        if include_zero:
            shifts = np.union1d(shifts, np.zeros(1, dtype=np.int64))
        return cls(shifts=shifts, resolution=resolution, delta=delta)

    @classmethod
    def around(
        cls,
        center: int,
        mesh: int,
        half_steps: int,
        delta: int,
        *,
        anchor: int = 0,
        resolution: int = DEFAULT_RESOLUTION,
    ) -> ShiftGrid:
        """Grid over center +- half_steps * mesh, clipped to (-delta, delta)."""
        lo = max(center - half_steps * mesh, -delta + 1)
        hi = min(center + half_steps * mesh, delta - 1)
        return cls.regular(
            lo, hi, mesh, delta, anchor=anchor, include_zero=False, resolution=resolution
        )


@dataclasses.dataclass(frozen=True)
class ContrastCurve:
    """Contrast values over a grid, with the minimal maximizer of |value|."""

    shifts: np.ndarray
    values: np.ndarray
    resolution: int = DEFAULT_RESOLUTION
    argmax_shift: int = dataclasses.field(init=False)
    argmax_abs_value: float = dataclasses.field(init=False)

    def __post_init__(self) -> None:
        shifts = _frozen(self.shifts, np.int64)
        values = _frozen(self.values, np.float64)
        if len(shifts) != len(values) or len(shifts) == 0:
            raise InvalidInputError("a contrast curve needs one value per shift")
        if np.any(np.diff(shifts) <= 0):
            raise InvalidInputError("curve shifts must be strictly increasing")
        # np.argmax returns the first maximizer, i.e. the minimum shift
        index = int(np.argmax(np.abs(values)))
        object.__setattr__(self, "shifts", shifts)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "argmax_shift", int(shifts[index]))
        object.__setattr__(self, "argmax_abs_value", float(abs(values[index])))

    def __len__(self) -> int:
        return len(self.shifts)

    @property
    def argmax_value(self) -> float:
        return float(self.values[self.shifts == self.argmax_shift][0])


@dataclasses.dataclass(frozen=True)
class LeadLagEstimate:
    """Result of maximizing |U^n| over a shift grid."""

    theta_hat: int
    contrast_at_max: float
    mesh_delta_n: int
    grid_size: int
    horizon: int
    resolution: int = DEFAULT_RESOLUTION

    @property
    def bracket(self) -> t.Tuple[int, int]:
        """The interval of width 2*Delta_n around theta_hat."""
        return self.theta_hat - self.mesh_delta_n, self.theta_hat + self.mesh_delta_n

    @property
    def leader(self) -> t.Optional[str]:
        """`X` when X leads (positive estimate), `Y` when Y leads, else None."""
        if self.theta_hat > 0:
            return "X"
        if self.theta_hat < 0:
            return "Y"
        return None

    def as_dict(self) -> t.Dict[str, t.Any]:
        return {
            "theta_hat": format_ticks(self.theta_hat, self.resolution),
            "contrast_at_max": self.contrast_at_max,
            "mesh_delta_n": format_ticks(self.mesh_delta_n, self.resolution),
            "grid_size": self.grid_size,
            "horizon": format_ticks(self.horizon, self.resolution),
            "leader": self.leader or "",
        }


_frozen_model = pydantic.ConfigDict(frozen=True, extra="forbid")


class BachelierParams(pydantic.BaseModel):
    """
    Parameters of the lead-lag Bachelier model.

    Times (`theta`, `T`, `delta`, `sim_mesh`) are in ticks of `resolution`
    per model unit; use `from_units` to give them in model units.
    """

    model_config = _frozen_model

    x0: float = 0.0
    y0: float = 0.0
    sigma1: float = pydantic.Field(1.0, gt=0)
    sigma2: float = pydantic.Field(1.0, gt=0)
    rho: float = pydantic.Field(..., ge=-1, le=1)
    theta: int
    T: int = pydantic.Field(..., gt=0)
    delta: int = pydantic.Field(..., gt=0)
    sim_mesh: int = pydantic.Field(1_000, gt=0)
    resolution: int = pydantic.Field(DEFAULT_RESOLUTION, gt=0)
    exponentiate: bool = False

    @pydantic.model_validator(mode="after")
    def _check_times(self) -> BachelierParams:
        if abs(self.theta) >= self.delta:
            raise ValueError("|theta| must be smaller than delta")
        if (self.T + self.delta) % self.sim_mesh:
            raise ValueError("sim_mesh must divide T + delta")
        if self.theta % self.sim_mesh:
            raise ValueError("theta must be a multiple of sim_mesh")
        return self

    @classmethod
    def from_units(
        cls,
        *,
        theta: t.Any,
        T: t.Any,
        delta: t.Any,
        sim_mesh: t.Any = "0.001",
        resolution: int = DEFAULT_RESOLUTION,
        **kwargs: t.Any,
    ) -> BachelierParams:
        return cls(
            theta=to_ticks(theta, resolution),
            T=to_ticks(T, resolution),
            delta=to_ticks(delta, resolution),
            sim_mesh=to_ticks(sim_mesh, resolution),
            resolution=resolution,
            **kwargs,
        )

    @property
    def span(self) -> int:
        return self.T + self.delta

    @property
    def steps(self) -> int:
        return self.span // self.sim_mesh


class Synchronous(pydantic.BaseModel):
    """Every `period`-th tick of the simulation lattice, on [0, T + delta]."""

    model_config = _frozen_model

    kind: t.Literal["synchronous"] = "synchronous"
    period: int = pydantic.Field(..., gt=0)


class UniformRandom(pydantic.BaseModel):
    """`count` distinct points of the `base_mesh` lattice, endpoints included."""

    model_config = _frozen_model

    kind: t.Literal["uniform"] = "uniform"
    count: int = pydantic.Field(..., ge=2)
    base_mesh: int = pydantic.Field(..., gt=0)
    span_end: t.Optional[int] = pydantic.Field(None, gt=0)


SamplingScheme = t.Annotated[
    t.Union[Synchronous, UniformRandom], pydantic.Field(discriminator="kind")
]


@dataclasses.dataclass(frozen=True)
class PathPair:
    """Simulated X and Y on the simulation lattice 0, h, 2h, ..., T + delta."""

    grid_times: np.ndarray
    x_values: np.ndarray
    y_values: np.ndarray
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self) -> None:
        grid_times = _frozen(self.grid_times, np.int64)
        x_values = _frozen(self.x_values, np.float64)
        y_values = _frozen(self.y_values, np.float64)
        if not (len(grid_times) == len(x_values) == len(y_values)):
            raise InvalidInputError("path arrays differ in length")
        object.__setattr__(self, "grid_times", grid_times)
        object.__setattr__(self, "x_values", x_values)
        object.__setattr__(self, "y_values", y_values)

    @property
    def mesh(self) -> int:
        return int(self.grid_times[1] - self.grid_times[0])

    @property
    def span(self) -> int:
        return int(self.grid_times[-1])


@dataclasses.dataclass(frozen=True)
class MonteCarloReport:
    """Histogram of estimates over repeated simulate-sample-estimate runs."""

    histogram: t.Dict[int, int]
    n_runs: int
    config: t.Dict[str, t.Any]
    estimates: t.Tuple[int, ...] = ()
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self) -> None:
        if sum(self.histogram.values()) != self.n_runs:
            raise InvalidInputError("histogram counts do not sum to n_runs")
        object.__setattr__(self, "histogram", dict(sorted(self.histogram.items())))

    def count(self, theta_hat: int) -> int:
        return self.histogram.get(theta_hat, 0)

    def count_between(self, lo: int, hi: int) -> int:
        return sum(n for shift, n in self.histogram.items() if lo <= shift <= hi)

    @property
    def mode(self) -> int:
        return max(self.histogram.items(), key=lambda item: (item[1], -item[0]))[0]


@dataclasses.dataclass(frozen=True)
class SignaturePlot:
    """Realized volatility against the 1-in-k subsampling factor."""

    ks: np.ndarray
    realized_vols: np.ndarray

    def __post_init__(self) -> None:
        ks = _frozen(self.ks, np.int64)
        vols = _frozen(self.realized_vols, np.float64)
        if len(ks) != len(vols) or len(ks) == 0:
            raise InvalidInputError("a signature plot needs one value per k")
        if np.any(ks < 1) or np.any(np.diff(ks) <= 0):
            raise InvalidInputError("ks must be strictly increasing and >= 1")
        if np.any(vols < 0):
            raise InvalidInputError("realized volatility cannot be negative")
        object.__setattr__(self, "ks", ks)
        object.__setattr__(self, "realized_vols", vols)


@dataclasses.dataclass(frozen=True)
class MomentCheck:
    """Empirical versus closed-form moments of the contrast near theta."""

    shift: int
    empirical_mean: float
    empirical_var: float
    predicted_mean: float
    predicted_var: float
    n_sims: int
    adjacent_cov: float = 0.0
    adjacent_cov_se: float = 0.0

    @property
    def mean_se(self) -> float:
        return float(np.sqrt(self.predicted_var / self.n_sims))


@dataclasses.dataclass(frozen=True)
class RateRow:
    """Median absolute estimation error (ticks) for one sampling period."""

    delta_n: int
    median_abs_error: float
    n_runs: int
