"""The `hy-leadlag` command line."""
from __future__ import annotations

import argparse
import logging
import sys
import typing as t

import pydantic

from ..errors import LeadLagError
from ..utils import DEFAULT_RESOLUTION
from .commands import (
    RunConfig,
    cmd_curve,
    cmd_estimate,
    cmd_montecarlo,
    cmd_rerun,
    cmd_sigplot,
    cmd_simulate,
)
from .ingest import TickFileSpec, ingest


logger = logging.getLogger(__name__)

PROG = "hy-leadlag"

SIGN_CONVENTION = (
    "Sign convention: a positive shift or estimate means the asset in the X file "
    "leads the asset in the Y file; a negative one means Y leads."
)


def _time_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("time units")
    g.add_argument(
        "--time-unit",
        choices=["seconds", "milliseconds", "microseconds", "nanoseconds"],
        default="seconds",
        help="unit of tick-file timestamps and of every time-valued option (default: seconds)",
    )
    g.add_argument(
        "--resolution",
        type=int,
        default=DEFAULT_RESOLUTION,
        help="internal ticks per second (default: %(default)s)",
    )
    return p


def _output_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("output")
    g.add_argument("--format", choices=["csv", "json"], default="csv")
    g.add_argument("--out", default=None, help="output file (default: stdout)")
    return p


def _tick_file_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("tick files")
    g.add_argument("--time-column", default="0", help="name or 0-based index (default: 0)")
    g.add_argument("--price-column", default="1", help="name or 0-based index (default: 1)")
    g.add_argument("--delimiter", default=",")
    g.add_argument("--no-header", action="store_true", help="files have no header row")
    return p


def _grid_options(required: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("shift grid")
    g.add_argument("--grid-min", required=required, help="smallest candidate shift")
    g.add_argument("--grid-max", required=required, help="largest candidate shift")
    g.add_argument("--grid-mesh", required=required, help="spacing of candidate shifts")
    g.add_argument("--grid-anchor", default="0", help="grid points are anchor + k * mesh")
    g.add_argument("--no-zero", action="store_true", help="do not add shift 0 to the grid")
    g.add_argument(
        "--horizon",
        default=None,
        help="contrast horizon T (default: common data end less the widest shift)",
    )
    g.add_argument("--workers", type=int, default=None, help="parallel workers")
    return p


def _model_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("lead-lag Bachelier model")
    g.add_argument("--seed", type=int, default=0, help="master seed (default: 0)")
    g.add_argument("--x0", type=float, default=0.0)
    g.add_argument("--y0", type=float, default=0.0)
    g.add_argument("--sigma1", type=float, default=1.0)
    g.add_argument("--sigma2", type=float, default=1.0)
    g.add_argument("--rho", type=float, default=0.75)
    g.add_argument("--theta", default="0.1", help="true lead-lag (default: 0.1)")
    g.add_argument("--T", dest="T", default="1", help="observation horizon (default: 1)")
    g.add_argument("--delta", default="1", help="bound on |theta| (default: 1)")
    g.add_argument("--sim-mesh", default="0.001", help="simulation lattice step")
    g.add_argument("--exponentiate", action="store_true", help="geometric (exp) paths")
    s = p.add_argument_group("sampling")
    s.add_argument("--period", default="0.001", help="synchronous sampling period")
    s.add_argument(
        "--uniform-count",
        type=int,
        default=None,
        help="sample this many uniform random times per asset instead",
    )
    s.add_argument("--base-mesh", default="0.001", help="lattice for uniform sampling")
    s.add_argument("--sample-end", default=None, help="end of the uniform sampling window")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Lead-lag estimation with the shifted Hayashi-Yoshida contrast.",
        epilog=SIGN_CONVENTION,
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for progress, -vv for debug"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    time_opts = _time_options()
    out_opts = _output_options()
    tick_opts = _tick_file_options()

    for name, func, text in (
        ("estimate", cmd_estimate, "estimate the lead-lag between two tick files"),
        ("curve", cmd_curve, "contrast value at every grid shift"),
    ):
        p = sub.add_parser(
            name,
            parents=[time_opts, out_opts, tick_opts, _grid_options(required=True)],
            help=text,
            description=text,
            epilog=SIGN_CONVENTION,
        )
        p.add_argument("x_file", help="ticks of asset X")
        p.add_argument("y_file", help="ticks of asset Y")
        p.add_argument(
            "--delta",
            default=None,
            help="bound on |shift| (default: one grid mesh beyond the widest shift)",
        )
        p.set_defaults(func=func)

    p = sub.add_parser(
        "sigplot",
        parents=[time_opts, out_opts, tick_opts],
        help="realized volatility against 1-in-k subsampling",
    )
    p.add_argument("tick_file")
    p.add_argument("--ks", default="1,2,5,10,20", help="comma-separated factors k")
    p.set_defaults(func=cmd_sigplot)

    p = sub.add_parser(
        "simulate",
        parents=[time_opts, _model_options()],
        help="simulate and sample a lead-lag pair into two tick files",
        epilog=SIGN_CONVENTION,
    )
    p.add_argument("--out-x", required=True)
    p.add_argument("--out-y", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser(
        "montecarlo",
        parents=[time_opts, out_opts, _model_options(), _grid_options(required=False)],
        help="histogram of estimates over repeated simulations",
    )
    p.add_argument("--runs", type=int, default=300)
    p.add_argument("--half-steps", type=int, default=50, help="grid meshes either side of theta")
    p.add_argument("--full-grid", action="store_true", help="search all of (-delta, delta)")
    p.set_defaults(func=cmd_montecarlo)

    p = sub.add_parser("rerun", help="replay the run recorded in an artifact")
    p.add_argument("artifact", help="CSV or JSON artifact, or a simulated tick file")
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--out-x", default=None, help="X tick file when replaying simulate")
    p.add_argument("--out-y", default=None, help="Y tick file when replaying simulate")
    p.set_defaults(func=cmd_rerun)
    return parser


def _fail(code: str, message: str) -> int:
    print(f"{PROG}: error[{code}]: {' '.join(message.split())}", file=sys.stderr)
    return 1


def main(argv: t.Optional[t.Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr
    )
    try:
        return args.func(args)
    except LeadLagError as exc:
        return _fail(exc.code, str(exc))
    except pydantic.ValidationError as exc:
        error = exc.errors()[0]
        where = ".".join(str(part) for part in error["loc"])
        return _fail("invalid-input", f"{where}: {error['msg']}" if where else error["msg"])


__all__ = ["RunConfig", "TickFileSpec", "build_parser", "ingest", "main"]
