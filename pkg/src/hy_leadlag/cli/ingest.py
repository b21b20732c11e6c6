"""Read and write tick files (one asset per file, time and price columns)."""
from __future__ import annotations

import fractions
import logging
import math
import pathlib
import typing as t

import numpy as np
import pandas as pd
import pydantic

from ..errors import IngestError, InvalidInputError
from ..models import TickSeries
from ..utils import DEFAULT_RESOLUTION, format_ticks


logger = logging.getLogger(__name__)

TimeUnit = t.Literal["seconds", "milliseconds", "microseconds", "nanoseconds"]

UNITS_PER_SECOND: t.Dict[str, int] = {
    "seconds": 1,
    "milliseconds": 1_000,
    "microseconds": 1_000_000,
    "nanoseconds": 1_000_000_000,
}

_INT64_MAX = int(np.iinfo(np.int64).max)


class TickFileSpec(pydantic.BaseModel):
    """
    Where and how to read one asset's ticks.

    `resolution` is the internal number of ticks per second; every timestamp in
    the file must convert to a whole number of ticks.
    """

    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    path: str
    time_column: t.Union[int, str] = 0
    price_column: t.Union[int, str] = 1
    time_unit: TimeUnit = "seconds"
    delimiter: str = pydantic.Field(",", min_length=1, max_length=1)
    header: bool = True
    resolution: int = pydantic.Field(DEFAULT_RESOLUTION, gt=0)
    label: t.Optional[str] = None


def unit_to_ticks(text: t.Any, unit: str, resolution: int) -> int:
    """
    Convert a decimal time given in `unit` to ticks, exactly.

    Raises:
        InvalidInputError: not a number (`parse-error`), not a whole number of
            ticks (`precision-loss`) or outside int64 (`unit-overflow`)
    """
    try:
        value = fractions.Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise InvalidInputError(f"{text!r} is not a decimal time", code="parse-error") from None
    ticks = value * resolution / UNITS_PER_SECOND[unit]
    if ticks.denominator != 1:
        raise InvalidInputError(
            f"{text} {unit} is finer than the tick resolution {resolution}/s",
            code="precision-loss",
        )
    if abs(ticks.numerator) > _INT64_MAX:
        raise InvalidInputError(f"{text} {unit} overflows the tick range", code="unit-overflow")
    return ticks.numerator


def ticks_to_unit(ticks: int, unit: str, resolution: int) -> str:
    """Exact decimal rendering of ticks in `unit`."""
    return format_ticks(int(ticks) * UNITS_PER_SECOND[unit], resolution)


def _column(frame: pd.DataFrame, column: t.Union[int, str], spec: TickFileSpec) -> pd.Series:
    try:
        if isinstance(column, int):
            return frame.iloc[:, column]
        return frame[column]
    except (IndexError, KeyError):
        raise IngestError(f"no column {column!r}", path=spec.path) from None


def ingest(spec: TickFileSpec) -> TickSeries:
    """
    Load a tick file into a TickSeries.

    Lines starting with `#` are ignored. Rows must be strictly time-sorted;
    row numbers in errors count data rows from 1.
    """
    try:
        frame = pd.read_csv(
            spec.path,
            sep=spec.delimiter,
            header=0 if spec.header else None,
            dtype=str,
            comment="#",
            keep_default_na=False,
            skipinitialspace=True,
        )
    except FileNotFoundError:
        raise IngestError("file not found", path=spec.path, code="io-error") from None
    except pd.errors.EmptyDataError:
        raise IngestError("file is empty", path=spec.path, code="empty-file") from None
    except pd.errors.ParserError as exc:
        raise IngestError(f"malformed file: {exc}", path=spec.path) from None
    except UnicodeDecodeError as exc:
        raise IngestError(f"undecodable bytes: {exc.reason}", path=spec.path) from None
    except OSError as exc:
        raise IngestError(str(exc), path=spec.path, code="io-error") from None
    if frame.empty:
        raise IngestError("file has no data rows", path=spec.path, code="empty-file")

    time_text = _column(frame, spec.time_column, spec)
    price_text = _column(frame, spec.price_column, spec)
    times: t.List[int] = []
    prices: t.List[float] = []
    for row, (time_cell, price_cell) in enumerate(zip(time_text, price_text), start=1):
        try:
            tick = unit_to_ticks(time_cell, spec.time_unit, spec.resolution)
        except InvalidInputError as exc:
            raise IngestError(str(exc), path=spec.path, row=row, code=exc.code) from None
        try:
            price = float(price_cell)
        except ValueError:
            price = math.nan
        if not math.isfinite(price):
            raise IngestError(f"bad price {price_cell!r}", path=spec.path, row=row)
        if times and tick == times[-1]:
            raise IngestError(
                f"duplicate timestamp {time_cell}",
                path=spec.path,
                row=row,
                code="duplicate-timestamp",
            )
        if times and tick < times[-1]:
            raise IngestError(
                f"timestamp {time_cell} is earlier than the previous row",
                path=spec.path,
                row=row,
                code="non-monotone",
            )
        times.append(tick)
        prices.append(price)
    label = spec.label or pathlib.Path(spec.path).stem
    logger.info(f"ingested {len(times)} ticks from {spec.path}")
    try:
        return TickSeries(label=label, times=times, prices=prices, resolution=spec.resolution)
    except InvalidInputError as exc:
        raise IngestError(str(exc), path=spec.path, code=exc.code) from None


def tick_rows(series: TickSeries, unit: str) -> t.List[t.Tuple[str, str]]:
    """(time, price) cells with exact times and round-trip prices."""
    return [
        (ticks_to_unit(tick, unit, series.resolution), repr(float(price)))
        for tick, price in zip(series.times, series.prices)
    ]
