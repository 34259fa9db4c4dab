"""Command line interface.

Subcommands cover the whole artifact surface: ``run`` evolves a config and
writes frames, ``perf`` reports modeled operation counts and intensity,
``convergence`` runs a resolution ladder, ``dump`` inspects a frame file,
and ``serve`` starts the HTTP service.  Errors print a single message and
exit nonzero; stack traces are reserved for actual bugs.

The ``CLAWTILE_LOG`` environment variable sets the log level (DEBUG, INFO,
WARNING, ...).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import __version__
from .config import load_config, parse_tiles
from .errors import ClawtileError
from .limiter import LimiterKind


def _add_run_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--workers", type=int, default=None, help="worker threads for tile execution")
    p.add_argument("--tiles", type=str, default=None, help="tile shape, e.g. 64x4")
    p.add_argument("--serial", action="store_true", help="single tile, single worker")
    p.add_argument("--precision", choices=("single", "double"), default=None)
    p.add_argument("--counters", action="store_true", help="collect operation counters")


def _overrides(args) -> dict:
    out = {}
    if args.workers is not None:
        out["workers"] = args.workers
    if args.tiles is not None:
        out["tiles"] = parse_tiles(args.tiles)
    if args.serial:
        out["serial"] = True
    if args.precision is not None:
        out["precision"] = args.precision
    if args.counters:
        out["counters"] = True
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clawtile",
        description="Tile-parallel finite-volume solver for hyperbolic conservation laws",
    )
    parser.add_argument("--version", action="version", version=f"clawtile {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="evolve a configured problem and write frames")
    p_run.add_argument("--config", required=True, help="path to a run config file")
    p_run.add_argument("--frames", default="frames", help="output directory for frame files")
    _add_run_overrides(p_run)

    p_perf = sub.add_parser("perf", help="run with counters and print the intensity report")
    p_perf.add_argument("--config", required=True)
    p_perf.add_argument(
        "--report-file", default=None,
        help="write the machine-readable report here (default: <config>.perf.tsv)",
    )
    _add_run_overrides(p_perf)

    p_conv = sub.add_parser("convergence", help="resolution ladder with observed orders")
    p_conv.add_argument("--config", required=True)
    p_conv.add_argument("--levels", type=int, default=4, help="number of doubled resolutions")
    p_conv.add_argument(
        "--limiter", choices=[k.value for k in LimiterKind], default=None,
        help="override the configured limiter",
    )

    p_dump = sub.add_parser("dump", help="describe a frame file, optionally as text data")
    p_dump.add_argument("frame", help="path to a .clw frame file")
    p_dump.add_argument("--csv", default=None, help="write coordinates and values here")

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    return parser


def _cmd_run(args) -> int:
    from .runner import run_to_frames

    cfg = load_config(args.config).with_overrides(**_overrides(args))
    summary = run_to_frames(cfg, args.frames)
    print(
        f"{cfg.problem}: t={summary.t_final:g} in {summary.steps_accepted} steps "
        f"({summary.steps_reverted} reverted), peak CFL {summary.nu_max:.4f}, "
        f"{len(summary.frames)} frames in {args.frames} "
        f"[{summary.wall_seconds:.2f}s]"
    )
    return 0


def _cmd_perf(args) -> int:
    from .perf import render_delimited, render_text
    from .runner import run_perf

    cfg = load_config(args.config).with_overrides(**_overrides(args))
    report, summary = run_perf(cfg)
    print(render_text(report))
    print(
        f"run: {summary.steps_accepted} steps, t={summary.t_final:g}, "
        f"[{summary.wall_seconds:.2f}s]"
    )
    out = args.report_file or (args.config + ".perf.tsv")
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(render_delimited(report))
    print(f"report written to {out}")
    return 0


def _cmd_convergence(args) -> int:
    from .runner import run_convergence

    cfg = load_config(args.config)
    if args.limiter is not None:
        cfg = cfg.with_overrides(limiter=LimiterKind.from_name(args.limiter))
    result = run_convergence(cfg, args.levels)
    name = cfg.problem_def.field_names[0]
    print(f"self-convergence of {name!r}, reference {result.reference_cells}")
    print(f"{'cells':>16}  {'L1 error':>12}  {'order':>6}")
    for lv in result.levels:
        cells = "x".join(str(c) for c in lv.cells)
        order = f"{lv.order:.3f}" if lv.order is not None else "-"
        print(f"{cells:>16}  {lv.error:>12.6e}  {order:>6}")
    return 0


def _cmd_dump(args) -> int:
    from .frames import read_frame

    frame = read_frame(args.frame)
    h = frame.header
    dims = "x".join(str(d) for d in h.dims)
    print(f"frame: {args.frame}")
    print(f"  dims {dims}, {h.num_states} states, {h.itemsize * 8}-bit")
    print(f"  time {h.time!r}, step {h.step}")
    for s, arr in enumerate(frame.states):
        print(
            f"  state {s}: min {arr.min():.6g}, max {arr.max():.6g}, "
            f"mean {arr.mean():.6g}"
        )
    if args.csv is not None:
        _write_csv(args.csv, frame)
        print(f"  data written to {args.csv}")
    return 0


def _write_csv(path: str, frame) -> None:
    import numpy as np

    h = frame.header
    # cell index per axis; coordinates are the consumer's concern since a
    # frame does not carry the domain bounds
    idx = np.indices(tuple(reversed(h.dims)))
    cols = [idx[d].ravel() for d in reversed(range(h.ndim))]
    names = ["i", "j", "k"][: h.ndim]
    header = ",".join(names + [f"state{s}" for s in range(h.num_states)])
    data = np.column_stack(cols + [st.ravel() for st in frame.states])
    fmt = ["%d"] * h.ndim + ["%.17g"] * h.num_states
    np.savetxt(path, data, fmt=fmt, delimiter=",", header=header, comments="")


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "perf": _cmd_perf,
    "convergence": _cmd_convergence,
    "dump": _cmd_dump,
    "serve": _cmd_serve,
}


def cli_main(argv: list[str] | None = None) -> int:
    level = os.environ.get("CLAWTILE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ClawtileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 130


def main() -> None:
    sys.exit(cli_main())
