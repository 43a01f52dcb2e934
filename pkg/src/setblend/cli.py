"""Command line front end.

Subcommands::

    average      blend two images at a parameter t
    subdivide    refine a slice stack with a subdivision scheme
    interpolate  densify a slice stack with the piecewise interpolant
    verify       run the library self-checks
    fixture      write built-in example stacks

Exit codes: 0 success, 2 result clipped by the requested domain, 3 file
problems, 4 bad arguments, 5 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import fixtures
from .errors import DomainClippedError, PnmFormatError, SetBlendError
from .measure_average import general_average_report
from .pnm import load_stack, read_pnm, save_stack, write_pnm
from .raster import Connectivity, measure, pad
from .schemes import (
    SchemeConfig,
    SetSeq,
    dk_sequence,
    eval_interpolant,
    subdivision_history,
)
from .verify import run_verification


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _float_fmt(v: float) -> str:
    return f"{v:.12g}"


def _parse_scheme(args) -> SchemeConfig:
    """Translate flags into a config, rejecting contradictory choices."""
    scheme = args.scheme
    degree = args.degree
    if scheme.startswith("spline-"):
        try:
            degree = int(scheme.split("-", 1)[1])
        except ValueError:
            raise _UsageError(f"bad scheme {scheme!r}")
        scheme = "spline"
    if scheme not in ("piecewise", "chaikin", "spline", "fourpoint"):
        raise _UsageError(f"unknown scheme {args.scheme!r}")
    if degree is not None and scheme != "spline":
        raise _UsageError("--degree only applies to spline schemes")
    if args.w is not None and scheme != "fourpoint":
        raise _UsageError("--w only applies to the fourpoint scheme")
    try:
        return SchemeConfig(
            scheme=scheme,
            degree=degree if degree is not None else 2,
            tension=args.w if args.w is not None else 1.0 / 16.0,
            levels=args.levels,
            connectivity=Connectivity(args.connectivity),
            bound=args.param_bound,
            boundary=args.boundary,
        )
    except ValueError as e:
        raise _UsageError(str(e))


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--connectivity", type=int, choices=(4, 8), default=8,
                   help="component neighborhood (default 8)")
    p.add_argument("--param-bound", type=float, default=8.0,
                   help="largest blend parameter magnitude searched (default 8)")
    p.add_argument("--threshold", type=int, default=127,
                   help="graymap pixels above this are in-set (default 127)")


def _add_scheme_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheme", default="chaikin",
                   help="piecewise | chaikin | spline[-m] | fourpoint")
    p.add_argument("--degree", type=int, default=None,
                   help="spline degree (spline scheme only)")
    p.add_argument("--w", type=float, default=None,
                   help="fourpoint tension (default 1/16)")
    p.add_argument("--levels", type=int, default=1, help="refinement rounds")
    p.add_argument("--boundary", choices=("open", "extend"), default="open",
                   help="end treatment: endpoint rules or constant extension")
    p.add_argument("--spacing", type=float, default=1.0,
                   help="parameter gap between input slices")
    p.add_argument("--format", default="P5", choices=("P1", "P2", "P4", "P5"),
                   help="output image format")
    p.add_argument("--out-dir", required=True, help="directory for outputs")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="setblend",
                     description="Measure-matched shape blending and subdivision")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("average",
                       help="blend two images at parameter t")
    p.add_argument("image_a")
    p.add_argument("image_b")
    p.add_argument("--t", type=float, required=True, help="blend parameter")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--pad", default="auto",
                   help="'auto' or a fixed number of border cells")
    p.add_argument("--format", default="P5", choices=("P1", "P2", "P4", "P5"))
    _add_common(p)
    p.set_defaults(func=cmd_average)

    p = sub.add_parser("subdivide",
                       help="refine a slice stack")
    p.add_argument("pattern", help="slice path pattern with one %%d placeholder")
    _add_scheme_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_subdivide)

    p = sub.add_parser("interpolate",
                       help="insert intermediate slices")
    p.add_argument("pattern", help="slice path pattern with one %%d placeholder")
    p.add_argument("--between", type=int, required=True,
                   help="slices to insert between neighbors")
    _add_scheme_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_interpolate)

    p = sub.add_parser("verify",
                       help="run the library self-checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=6)
    p.add_argument("--size", type=int, default=48, help="test grid side length")
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fixture",
                       help="write a built-in example stack")
    p.add_argument("name", choices=("bands", "disk", "nested", "constant", "blobs"))
    p.add_argument("--cells", type=int, default=None, help="grid resolution")
    p.add_argument("--start", type=float, default=None)
    p.add_argument("--stop", type=float, default=None)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--count", type=int, default=4, help="copies for 'constant'")
    p.add_argument("--format", default="P5", choices=("P1", "P2", "P4", "P5"))
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_fixture)
    return parser


# -- subcommands ----------------------------------------------------------


def cmd_average(args) -> int:
    a = read_pnm(args.image_a, threshold=args.threshold)
    b = read_pnm(args.image_b, threshold=args.threshold)
    if a.shape != b.shape:
        raise _UsageError(
            f"image dimensions differ: {a.shape[1]}x{a.shape[0]} vs "
            f"{b.shape[1]}x{b.shape[0]}"
        )
    fixed = None
    if args.pad != "auto":
        try:
            fixed = int(args.pad)
        except ValueError:
            raise _UsageError(f"--pad expects 'auto' or an integer, got {args.pad!r}")
        if fixed < 0:
            raise _UsageError("--pad must be non-negative")
        a, b = pad(a, fixed), pad(b, fixed)
    result, report = general_average_report(
        a, b, args.t, args.param_bound, Connectivity(args.connectivity)
    )
    if fixed is not None and result.shape != a.shape:
        raise DomainClippedError(
            f"result needs {result.shape[1]}x{result.shape[0]} cells, "
            f"--pad {fixed} only allows {a.shape[1]}x{a.shape[0]}"
        )
    write_pnm(args.out, result, args.format)
    line = {"type": "average-report", "t": args.t, "out": str(args.out),
            "width": result.width, "height": result.height}
    line.update(report.to_dict())
    print(json.dumps(line, sort_keys=True))
    return 0


def _load_seq(args) -> SetSeq:
    stack = load_stack(args.pattern, threshold=args.threshold)
    if len(stack.slices) < 2:
        raise _UsageError(f"need at least two slices, found {len(stack.slices)}")
    positions = [i * args.spacing for i in range(len(stack.slices))]
    return SetSeq(stack.slices, tuple(positions))


def cmd_subdivide(args) -> int:
    cfg = _parse_scheme(args)
    seq = _load_seq(args)
    history = subdivision_history(seq, cfg)
    out_dir = Path(args.out_dir)
    save_stack(out_dir, history[-1].sets, args.format)
    with open(out_dir / "measures.csv", "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["level", "index", "position", "measure"])
        for stage in history:
            for i, (s, p) in enumerate(zip(stage.sets, stage.positions)):
                wr.writerow([stage.level, i, _float_fmt(p), _float_fmt(measure(s))])
    dks = dk_sequence(history)
    with open(out_dir / "dk.csv", "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["level", "dk"])
        for stage, dk in zip(history, dks):
            wr.writerow([stage.level, _float_fmt(dk)])
    print(json.dumps({
        "type": "subdivide-report", "scheme": cfg.scheme, "levels": cfg.levels,
        "slices": len(history[-1]), "out_dir": str(out_dir),
    }, sort_keys=True))
    return 0


def cmd_interpolate(args) -> int:
    cfg = _parse_scheme(args)
    if args.between < 1:
        raise _UsageError("--between must be at least 1")
    seq = _load_seq(args)
    xs: list[float] = []
    for p0, p1 in zip(seq.positions, seq.positions[1:]):
        xs.append(p0)
        for j in range(1, args.between + 1):
            xs.append(p0 + (p1 - p0) * j / (args.between + 1))
    xs.append(seq.positions[-1])
    shapes = [eval_interpolant(seq, x, cfg) for x in xs]
    out_dir = Path(args.out_dir)
    save_stack(out_dir, shapes, args.format)
    with open(out_dir / "measures.csv", "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["level", "index", "position", "measure"])
        for i, (x, s) in enumerate(zip(xs, shapes)):
            wr.writerow([0, i, _float_fmt(x), _float_fmt(measure(s))])
    print(json.dumps({
        "type": "interpolate-report", "between": args.between,
        "slices": len(shapes), "out_dir": str(args.out_dir),
    }, sort_keys=True))
    return 0


def cmd_verify(args) -> int:
    report = run_verification(
        seed=args.seed,
        trials=args.trials,
        shape=(args.size, args.size),
        cfg=SchemeConfig(connectivity=Connectivity(args.connectivity),
                         bound=args.param_bound),
    )
    for line in report.to_json_lines():
        print(line)
    return 0 if report.passed else 5


def cmd_fixture(args) -> int:
    name = args.name
    fmt = args.format
    out_dir = Path(args.out_dir)
    if name == "bands":
        cells = args.cells or 128
        start = args.start if args.start is not None else -0.875
        stop = args.stop if args.stop is not None else 0.875
        step = args.step or 0.25
        n = int(round((stop - start) / step))
        xs = [start + i * step for i in range(n + 1)]
        shapes = [fixtures.bands_raster(x, cells) for x in xs]
    elif name == "disk":
        cells = args.cells or 256
        step = args.step or 0.125
        seq = fixtures.growing_disk_seq(step, cells)
        xs, shapes = list(seq.positions), list(seq.sets)
    elif name == "nested":
        cells = args.cells or 128
        seq = fixtures.monotone_disk_seq(cells=cells)
        xs, shapes = list(seq.positions), list(seq.sets)
    elif name == "constant":
        cells = args.cells or 64
        seq = fixtures.constant_seq(args.count, cells=cells)
        xs, shapes = list(seq.positions), list(seq.sets)
    else:  # blobs
        cells = args.cells or 64
        a, b = fixtures.blob_pair(cells)
        xs, shapes = [0.0, 1.0], [a, b]
    paths = save_stack(out_dir, shapes, fmt)
    print(json.dumps({
        "type": "fixture-report", "name": name, "slices": len(paths),
        "positions": [_float_fmt(x) for x in xs], "out_dir": str(out_dir),
    }, sort_keys=True))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(f"setblend: error: {e}", file=sys.stderr)
        return 4
    if getattr(args, "func", None) is None:
        parser.print_help()
        return 4
    try:
        return args.func(args) or 0
    except _UsageError as e:
        print(f"setblend: error: {e}", file=sys.stderr)
        return 4
    except DomainClippedError as e:
        print(f"setblend: clipped: {e}", file=sys.stderr)
        return 2
    except PnmFormatError as e:
        print(f"setblend: file error: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"setblend: file error: {e}", file=sys.stderr)
        return 3
    except (SetBlendError, ValueError) as e:
        print(f"setblend: error: {e}", file=sys.stderr)
        return 4


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
