"""Miscellaneous helpers: exact tick arithmetic and seeded random streams."""
from __future__ import annotations

import decimal
import typing as t

import numpy as np
from scipy import special

from .errors import InvalidInputError


DEFAULT_RESOLUTION = 1_000_000
"""Ticks per model time unit (one tick = 1e-6 units)."""

_INT64_MAX = int(np.iinfo(np.int64).max)

Number = t.Union[int, float, str, decimal.Decimal]


def to_decimal(value: Number) -> decimal.Decimal:
    """Parse a decimal value, going through `str` for floats so 0.1 stays 0.1."""
    if isinstance(value, decimal.Decimal):
        return value
    if isinstance(value, float):
        value = repr(value)
    try:
        parsed = decimal.Decimal(str(value).strip())
    except decimal.InvalidOperation:
        raise InvalidInputError(f"{value!r} is not a decimal number") from None
    if not parsed.is_finite():
        raise InvalidInputError(f"{value!r} is not finite")
    return parsed


def to_ticks(value: Number, resolution: int = DEFAULT_RESOLUTION) -> int:
    """
    Convert a model-time value to an integer number of ticks.

    Args:
        value: time in model units (e.g. 0.001)
        resolution: ticks per model unit

    Raises:
        InvalidInputError: the value is not a whole number of ticks
            (code `precision-loss`) or does not fit in int64 (`unit-overflow`).
    """
    scaled = to_decimal(value) * resolution
    if scaled != scaled.to_integral_value():
        raise InvalidInputError(
            f"{value} is not a whole number of ticks at resolution {resolution}/unit",
            code="precision-loss",
        )
    ticks = int(scaled)
    if abs(ticks) > _INT64_MAX:
        raise InvalidInputError(f"{value} overflows the tick range", code="unit-overflow")
    return ticks


def ticks_to_decimal(ticks: int, resolution: int = DEFAULT_RESOLUTION) -> decimal.Decimal:
    return decimal.Decimal(int(ticks)) / decimal.Decimal(resolution)


def format_ticks(ticks: int, resolution: int = DEFAULT_RESOLUTION) -> str:
    """Render ticks as an exact decimal string in model units, e.g. `0.1`."""
    value = ticks_to_decimal(ticks, resolution)
    text = format(value, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    if text in ("", "-0"):
        text = "0"
    return text


def seed_sequence(seed: int, *key: int) -> np.random.SeedSequence:
    if seed < 0:
        raise InvalidInputError(f"seed must be non-negative, got {seed}")
    return np.random.SeedSequence(seed, spawn_key=tuple(key))


def derive_seed(master: int, *key: int) -> int:
    """
    Derive an independent child seed from a master seed and an index path.

    The child is the first 64-bit word of
    `SeedSequence(master, spawn_key=key).generate_state(1, uint64)`.
    """
    return int(seed_sequence(master, *key).generate_state(1, np.uint64)[0])


def stream(seed: int, *key: int) -> np.random.Generator:
    """A Philox-backed generator for the sub-stream `key` of `seed`."""
    return np.random.Generator(np.random.Philox(seed_sequence(seed, *key)))


def standard_normal(gen: np.random.Generator, size: int) -> np.ndarray:
    """
    Draw standard normals by inverse CDF from the raw 64-bit Philox output.

    The top 53 bits m of each word give u = (m + 0.5) * 2**-53, which lies
    strictly inside (0, 1), and z = ndtri(u).
    """
    raw = gen.bit_generator.random_raw(size)
    mantissa = np.right_shift(np.asarray(raw, dtype=np.uint64), np.uint64(11))
    u = (mantissa.astype(np.float64) + 0.5) * 2.0**-53
    return special.ndtri(u)
