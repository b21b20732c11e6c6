"""Subcommand implementations; each wraps one library operation."""
from __future__ import annotations

import argparse
import decimal
import logging
import typing as t

import pydantic

from .. import analyze, core, simulate
from ..errors import InvalidInputError
from ..models import (
    BachelierParams,
    SamplingScheme,
    ShiftGrid,
    Synchronous,
    TickSeries,
    UniformRandom,
)
from .ingest import TickFileSpec, ingest, tick_rows, ticks_to_unit, unit_to_ticks
from .output import read_config, render_csv, write_artifact, write_text


logger = logging.getLogger(__name__)

# namespace attributes that are not run options
_NOT_OPTIONS = {"func", "verbose", "command", "seed", "out", "format", "write_to"}


class RunConfig(pydantic.BaseModel):
    """The fully-resolved flags of one run, echoed into every artifact."""

    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    command: t.Literal["estimate", "curve", "sigplot", "simulate", "montecarlo"]
    options: t.Dict[str, t.Any]
    master_seed: t.Optional[int] = None
    output_path: t.Optional[str] = None
    output_format: t.Literal["csv", "json"] = "csv"

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        options = {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_OPTIONS}
        return cls(
            command=args.command,
            options=options,
            master_seed=getattr(args, "seed", None),
            output_path=getattr(args, "out", None),
            output_format=getattr(args, "format", "csv"),
        )

    def to_namespace(self) -> argparse.Namespace:
        ns = argparse.Namespace(**self.options)
        ns.command = self.command
        ns.out = self.output_path
        ns.format = self.output_format
        if self.master_seed is not None:
            ns.seed = self.master_seed
        return ns


def _target(args: argparse.Namespace, name: str) -> t.Optional[str]:
    """Where to write output `name`: the rerun override if any, else the flag."""
    write_to = getattr(args, "write_to", None)
    if write_to is not None:
        return write_to.get(name)
    return getattr(args, name)


def _ticks(args: argparse.Namespace, name: str) -> int:
    value = getattr(args, name)
    try:
        return unit_to_ticks(value, args.time_unit, args.resolution)
    except InvalidInputError as exc:
        flag = "--" + name.replace("_", "-")
        raise InvalidInputError(f"{flag}: {exc}", code=exc.code) from None


def _optional_ticks(args: argparse.Namespace, name: str) -> t.Optional[int]:
    if getattr(args, name, None) is None:
        return None
    return _ticks(args, name)


def _in_unit(args: argparse.Namespace, ticks: int) -> decimal.Decimal:
    return decimal.Decimal(ticks_to_unit(ticks, args.time_unit, args.resolution))


def _column(value: str) -> t.Union[int, str]:
    return int(value) if value.lstrip("-").isdigit() else value


def _tick_file(args: argparse.Namespace, path: str) -> TickSeries:
    spec = TickFileSpec(
        path=path,
        time_column=_column(args.time_column),
        price_column=_column(args.price_column),
        time_unit=args.time_unit,
        delimiter=args.delimiter,
        header=not args.no_header,
        resolution=args.resolution,
    )
    return ingest(spec)


def _grid(args: argparse.Namespace, delta: t.Optional[int] = None) -> ShiftGrid:
    for name in ("grid_min", "grid_max", "grid_mesh"):
        if getattr(args, name, None) is None:
            raise InvalidInputError(f"--{name.replace('_', '-')} is required")
    lo = _ticks(args, "grid_min")
    hi = _ticks(args, "grid_max")
    mesh = _ticks(args, "grid_mesh")
    if delta is None:
        delta = _optional_ticks(args, "delta")
    if delta is None:
        delta = max(abs(lo), abs(hi)) + mesh
    return ShiftGrid.regular(
        lo,
        hi,
        mesh,
        delta,
        anchor=_ticks(args, "grid_anchor"),
        include_zero=not args.no_zero,
        resolution=args.resolution,
    )


def _params(args: argparse.Namespace) -> BachelierParams:
    return BachelierParams(
        x0=args.x0,
        y0=args.y0,
        sigma1=args.sigma1,
        sigma2=args.sigma2,
        rho=args.rho,
        theta=_ticks(args, "theta"),
        T=_ticks(args, "T"),
        delta=_ticks(args, "delta"),
        sim_mesh=_ticks(args, "sim_mesh"),
        resolution=args.resolution,
        exponentiate=args.exponentiate,
    )


def _scheme(args: argparse.Namespace) -> SamplingScheme:
    if args.uniform_count is not None:
        return UniformRandom(
            count=args.uniform_count,
            base_mesh=_ticks(args, "base_mesh"),
            span_end=_optional_ticks(args, "sample_end"),
        )
    return Synchronous(period=_ticks(args, "period"))


def _pair(args: argparse.Namespace) -> t.Tuple[TickSeries, TickSeries, ShiftGrid, t.Optional[int]]:
    x = _tick_file(args, args.x_file)
    y = _tick_file(args, args.y_file)
    return x, y, _grid(args), _optional_ticks(args, "horizon")


def cmd_estimate(args: argparse.Namespace) -> int:
    x, y, grid, horizon = _pair(args)
    estimate = core.estimate_leadlag(x, y, grid, horizon, workers=args.workers)
    leader = {"X": x.label, "Y": y.label}.get(estimate.leader or "", "none")
    row = (
        _in_unit(args, estimate.theta_hat),
        estimate.contrast_at_max,
        _in_unit(args, estimate.mesh_delta_n),
        estimate.grid_size,
        _in_unit(args, estimate.horizon),
        leader,
    )
    columns = ["theta_hat", "contrast_at_max", "mesh_delta_n", "grid_size", "horizon", "leader"]
    config = RunConfig.from_args(args).model_dump()
    write_artifact(_target(args, "out"), args.format, config, columns, [row])
    return 0


def cmd_curve(args: argparse.Namespace) -> int:
    x, y, grid, horizon = _pair(args)
    if horizon is None:
        horizon = core.default_horizon(x.end, y.end, grid)
    curve = core.contrast_curve(
        core.build_intervals(x), core.build_intervals(y), grid, horizon, workers=args.workers
    )
    rows = [(_in_unit(args, s), float(v)) for s, v in zip(curve.shifts, curve.values)]
    summary = {
        "argmax_shift": _in_unit(args, curve.argmax_shift),
        "contrast_at_max": curve.argmax_value,
        "horizon": _in_unit(args, horizon),
    }
    config = RunConfig.from_args(args).model_dump()
    write_artifact(_target(args, "out"), args.format, config, ["shift", "contrast"], rows, summary)
    return 0


def cmd_sigplot(args: argparse.Namespace) -> int:
    series = _tick_file(args, args.tick_file)
    try:
        ks = [int(k) for k in args.ks.split(",") if k.strip()]
    except ValueError:
        raise InvalidInputError(f"--ks: expected integers, got {args.ks!r}") from None
    plot = analyze.signature_plot(series, ks)
    rows = [(int(k), float(v)) for k, v in zip(plot.ks, plot.realized_vols)]
    config = RunConfig.from_args(args).model_dump()
    write_artifact(_target(args, "out"), args.format, config, ["k", "realized_vol"], rows)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    params = _params(args)
    scheme = _scheme(args)
    paths = simulate.simulate_bachelier(params, args.seed)
    x, y = simulate.sample(paths, scheme, scheme, args.seed)
    targets = {"out_x": x, "out_y": y}
    if any(_target(args, name) is None for name in targets):
        raise InvalidInputError("simulate needs --out-x and --out-y")
    config = RunConfig.from_args(args).model_dump()
    for name, series in targets.items():
        text = render_csv(config, ["time", "price"], tick_rows(series, args.time_unit))
        write_text(_target(args, name), text)
    logger.info(f"wrote {len(x)} X ticks and {len(y)} Y ticks")
    return 0


def cmd_montecarlo(args: argparse.Namespace) -> int:
    params = _params(args)
    scheme = _scheme(args)
    if args.grid_min is not None or args.grid_max is not None:
        grid = _grid(args, delta=params.delta)
    else:
        if args.grid_mesh is not None:
            mesh = _ticks(args, "grid_mesh")
        else:
            mesh = scheme.period if isinstance(scheme, Synchronous) else scheme.base_mesh
        grid = analyze.table_grid(
            params,
            mesh,
            half_steps=args.half_steps,
            full=args.full_grid,
            anchor=_ticks(args, "grid_anchor"),
        )
    report = analyze.montecarlo_table(
        params,
        scheme,
        scheme,
        grid,
        args.runs,
        args.seed,
        horizon_T=_optional_ticks(args, "horizon"),
        workers=args.workers,
    )
    rows = [(_in_unit(args, shift), count) for shift, count in report.histogram.items()]
    summary = {
        "n_runs": report.n_runs,
        "mode": _in_unit(args, report.mode),
        "at_theta": report.count(params.theta),
    }
    config = RunConfig.from_args(args).model_dump()
    write_artifact(_target(args, "out"), args.format, config, ["theta_hat", "count"], rows, summary)
    return 0


COMMANDS: t.Dict[str, t.Callable[[argparse.Namespace], int]] = {
    "estimate": cmd_estimate,
    "curve": cmd_curve,
    "sigplot": cmd_sigplot,
    "simulate": cmd_simulate,
    "montecarlo": cmd_montecarlo,
}


def cmd_rerun(args: argparse.Namespace) -> int:
    """Replay the run recorded in an artifact's config echo."""
    config = RunConfig(**read_config(args.artifact))
    ns = config.to_namespace()
    ns.write_to = {"out": args.out, "out_x": args.out_x, "out_y": args.out_y}
    logger.info(f"rerunning {config.command} from {args.artifact}")
    return COMMANDS[config.command](ns)
