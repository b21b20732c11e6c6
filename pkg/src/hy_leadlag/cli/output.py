"""CSV and JSON artifacts that carry their resolved run config."""
from __future__ import annotations

import decimal
import io
import json
import sys
import typing as t

from ..errors import InvalidInputError, LeadLagError


CONFIG_PREFIX = "# config: "

Cell = t.Union[str, int, float, decimal.Decimal]


def format_cell(value: Cell) -> str:
    """Shortest round-trip text for floats; exact text for decimals and ints."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _json_default(value: t.Any) -> t.Any:
    # times as exact decimal strings
    if isinstance(value, decimal.Decimal):
        return str(value)
    if hasattr(value, "item"):
        return value.item()
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dump_config(config: t.Mapping[str, t.Any]) -> str:
    return json.dumps(config, sort_keys=True, separators=(",", ":"), default=_json_default)


def render_csv(
    config: t.Mapping[str, t.Any],
    columns: t.Sequence[str],
    rows: t.Iterable[t.Sequence[Cell]],
) -> str:
    buf = io.StringIO()
    buf.write(CONFIG_PREFIX + dump_config(config) + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(format_cell(cell) for cell in row) + "\n")
    return buf.getvalue()


def render_json(
    config: t.Mapping[str, t.Any],
    columns: t.Sequence[str],
    rows: t.Iterable[t.Sequence[Cell]],
    summary: t.Optional[t.Mapping[str, t.Any]] = None,
) -> str:
    document: t.Dict[str, t.Any] = {
        "config": config,
        "rows": [dict(zip(columns, row)) for row in rows],
    }
    if summary:
        document["summary"] = dict(summary)
    return json.dumps(document, indent=2, sort_keys=True, default=_json_default) + "\n"


def write_text(path: t.Optional[str], text: str) -> None:
    """Write to `path`, or to stdout when path is None or `-`."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as exc:
        raise LeadLagError(f"{path}: {exc.strerror}", code="io-error") from None


def write_artifact(
    path: t.Optional[str],
    fmt: str,
    config: t.Mapping[str, t.Any],
    columns: t.Sequence[str],
    rows: t.Sequence[t.Sequence[Cell]],
    summary: t.Optional[t.Mapping[str, t.Any]] = None,
) -> None:
    if fmt == "csv":
        text = render_csv(config, columns, rows)
    elif fmt == "json":
        text = render_json(config, columns, rows, summary)
    else:
        raise InvalidInputError(f"unknown output format {fmt!r}")
    write_text(path, text)


def read_config(path: str) -> t.Dict[str, t.Any]:
    """Recover the config echoed in a CSV or JSON artifact."""
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise LeadLagError(f"{path}: {exc.strerror}", code="io-error") from None
    try:
        if text.startswith(CONFIG_PREFIX):
            config = json.loads(text.splitlines()[0][len(CONFIG_PREFIX) :])
        else:
            config = json.loads(text)["config"]
    except (ValueError, KeyError, TypeError):
        raise InvalidInputError(f"{path}: no config record found", code="parse-error") from None
    if not isinstance(config, dict):
        raise InvalidInputError(f"{path}: config record is not an object", code="parse-error")
    return config
