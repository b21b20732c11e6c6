"""Seeded simulation of lead-lag Bachelier paths and their sampling schemes."""
from __future__ import annotations

import logging
import math
import typing as t

import numpy as np

from .errors import InvalidInputError
from .models import (
    BachelierParams,
    PathPair,
    SamplingScheme,
    Synchronous,
    TickSeries,
    UniformRandom,
)
from .utils import format_ticks, standard_normal, stream


logger = logging.getLogger(__name__)

PATH_STREAM = 0
X_SAMPLING_STREAM = 1
Y_SAMPLING_STREAM = 2


def brownian_on_lattice(gen: np.random.Generator, first: int, last: int, step: float) -> np.ndarray:
    """
    A two-sided Brownian path on lattice indices first..last with value 0 at index 0.

    `first` <= 0 <= `last`; `step` is the lattice spacing in model units.
    """
    increments = math.sqrt(step) * standard_normal(gen, last - first)
    path = np.concatenate(([0.0], np.cumsum(increments)))
    return path - path[-first]


def simulate_bachelier(params: BachelierParams, seed: int) -> PathPair:
    """
    Simulate X_t = x0 + s1 B_t and Y_t = y0 + s2 (rho B_{t-theta} + sqrt(1-rho^2) W_{t-theta}).

    B and W are drawn once over the union of the windows X and Y read from,
    so the output is a pure function of (params, seed).
    """
    if not isinstance(params, BachelierParams):
        raise InvalidInputError("params must be BachelierParams")
    steps = params.steps
    lag = params.theta // params.sim_mesh
    first = min(0, -lag)
    last = max(steps, steps - lag)
    h = params.sim_mesh / params.resolution

    gen = stream(seed, PATH_STREAM)
    b = brownian_on_lattice(gen, first, last, h)
    w = brownian_on_lattice(gen, first, last, h)

    index = np.arange(steps + 1)
    lagged = index - lag - first
    x_values = params.x0 + params.sigma1 * b[index - first]
    y_values = params.y0 + params.sigma2 * (
        params.rho * b[lagged] + math.sqrt(1.0 - params.rho**2) * w[lagged]
    )
    if params.exponentiate:
        x_values = np.exp(x_values)
        y_values = np.exp(y_values)
    logger.debug(
        f"simulated {steps + 1} lattice points, "
        f"theta={format_ticks(params.theta, params.resolution)}"
    )
    return PathPair(
        grid_times=index * params.sim_mesh,
        x_values=x_values,
        y_values=y_values,
        resolution=params.resolution,
    )


def sampling_indices(
    paths: PathPair, scheme: SamplingScheme, gen: np.random.Generator
) -> np.ndarray:
    """Lattice indices picked by `scheme`, sorted."""
    mesh = paths.mesh
    span = paths.span
    if isinstance(scheme, Synchronous):
        if scheme.period % mesh or span % scheme.period:
            raise InvalidInputError(
                f"period {scheme.period} must be a multiple of the lattice step {mesh} "
                f"and divide the span {span}"
            )
        return np.arange(0, len(paths.grid_times), scheme.period // mesh)
    if isinstance(scheme, UniformRandom):
        end = span if scheme.span_end is None else scheme.span_end
        if scheme.base_mesh % mesh or end % scheme.base_mesh or end > span:
            raise InvalidInputError(
                f"base mesh {scheme.base_mesh} must be a multiple of the lattice step {mesh} "
                f"and divide a sampling window ending at or before {span}"
            )
        points = end // scheme.base_mesh
        if scheme.count > points:
            raise InvalidInputError(
                f"cannot draw {scheme.count} times from a window of {points} base steps"
            )
        interior = gen.choice(np.arange(1, points), size=scheme.count - 2, replace=False)
        chosen = np.concatenate(([0], np.sort(interior), [points]))
        return chosen * (scheme.base_mesh // mesh)
    raise InvalidInputError(f"unknown sampling scheme {scheme!r}")


def sample(
    paths: PathPair,
    scheme_x: SamplingScheme,
    scheme_y: SamplingScheme,
    seed: int,
) -> t.Tuple[TickSeries, TickSeries]:
    """Observe the simulated pair under independent sampling schemes for X and Y."""
    ix = sampling_indices(paths, scheme_x, stream(seed, X_SAMPLING_STREAM))
    iy = sampling_indices(paths, scheme_y, stream(seed, Y_SAMPLING_STREAM))
    x = TickSeries(
        label="X",
        times=paths.grid_times[ix],
        prices=paths.x_values[ix],
        resolution=paths.resolution,
    )
    y = TickSeries(
        label="Y",
        times=paths.grid_times[iy],
        prices=paths.y_values[iy],
        resolution=paths.resolution,
    )
    return x, y


def hat_function(u: t.Any) -> t.Any:
    """phi(u) = (1 - |u|) for |u| <= 1, else 0; works elementwise on arrays."""
    a = np.abs(np.asarray(u, dtype=np.float64))
    value = np.where(a <= 1.0, 1.0 - a, 0.0)
    if value.ndim == 0:
        return float(value)
    return value
