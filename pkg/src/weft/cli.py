"""Command-line interface.

    engine render page.html [--css f.css]... [--workers N] [--out d.json] ...
    engine bench page.html --workers 1,2,4 --reps 5
    engine mutate page.html --commands cmds.txt [--query 0/1/2]...

Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from .engine import (
    DUMP_KINDS,
    EngineOptions,
    benchmark,
    format_bench_table,
    run_mutate,
    run_pipeline,
)
from .errors import EngineError
from .script import parse_path


def _add_common(parser, workers_flag=True):
    parser.add_argument("page", help="HTML file to process")
    parser.add_argument("--css", action="append", default=[], metavar="FILE",
                        help="stylesheet to apply (repeatable)")
    if workers_flag:
        parser.add_argument("--workers", type=int, default=0,
                            help="worker threads for parallel traversals "
                                 "(default: logical core count)")
    parser.add_argument("--parallel-cutoff", type=int, default=16, metavar="K",
                        help="subtrees of at most K nodes run sequentially")
    parser.add_argument("--viewport", type=float, default=800.0, metavar="W",
                        help="viewport width in pixels (default 800)")


def _options(args, dump=None) -> EngineOptions:
    return EngineOptions(
        workers=args.workers,
        parallel_cutoff=args.parallel_cutoff,
        viewport=args.viewport,
        out_path=getattr(args, "out", None),
        raster_path=getattr(args, "raster", None),
        dump=dump,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="engine",
                                     description="small parallel web layout engine")
    sub = parser.add_subparsers(dest="command", required=True)

    render = sub.add_parser("render", help="render a page to a display list")
    _add_common(render)
    render.add_argument("--out", metavar="FILE", help="write display-list JSON here")
    render.add_argument("--raster", metavar="FILE", help="paint to a binary PPM")
    dumps = render.add_mutually_exclusive_group()
    for kind in DUMP_KINDS:
        dumps.add_argument(f"--dump-{kind}", action="store_const",
                           dest="dump", const=kind,
                           help=f"print the {kind} dump instead of JSON")

    bench = sub.add_parser("bench", help="time the layout stage")
    _add_common(bench, workers_flag=False)
    bench.add_argument("--workers", dest="worker_list", default="1,4",
                       metavar="N,N,...", help="comma-separated worker counts")
    bench.add_argument("--reps", type=int, default=5,
                       help="timed repetitions per worker count (ge 3)")

    mutate = sub.add_parser("mutate",
                            help="apply script commands, then incremental relayout")
    _add_common(mutate)
    mutate.add_argument("--commands", required=True, metavar="FILE",
                        help="file of script commands, one per line")
    mutate.add_argument("--query", action="append", default=[], metavar="PATH",
                        help="print the geometry of this node path after relayout")
    dumps = mutate.add_mutually_exclusive_group()
    for kind in DUMP_KINDS:
        dumps.add_argument(f"--dump-{kind}", action="store_const",
                           dest="dump", const=kind,
                           help=f"dump kind for the before/after output")
    return parser


def _cmd_render(args) -> int:
    result = run_pipeline(args.page, args.css, _options(args, args.dump))
    if result.error:
        print(f"error: {result.error}", file=sys.stderr)
        return 1
    for stage, ms in result.timings:
        print(f"{stage}\t{ms:.1f}", file=sys.stderr)
    for url in result.prefetch_urls:
        print(f"prefetch\t{url}", file=sys.stderr)
    for diag in result.diagnostics:
        print(f"diagnostic\t{diag}", file=sys.stderr)
    if args.dump:
        sys.stdout.write(result.dump_text)
    elif not args.out:
        print(result.display_json)
    return 0


def _cmd_bench(args, parser) -> int:
    try:
        counts = [int(w) for w in args.worker_list.split(",") if w]
    except ValueError:
        parser.error(f"bad worker list {args.worker_list!r}")
    if not counts or any(c < 1 for c in counts):
        parser.error("worker counts must be positive integers")
    if args.reps < 3:
        parser.error("--reps must be at least 3")
    report = benchmark(args.page, args.css, counts, args.reps,
                       viewport=args.viewport, cutoff=args.parallel_cutoff)
    sys.stdout.write(format_bench_table(report))
    return 0


def _cmd_mutate(args) -> int:
    from .engine import _read_text

    paths = []
    for text in args.query:
        path = parse_path(text)
        if path is None:
            print(f"error: bad path {text!r}", file=sys.stderr)
            return 1
        paths.append(path)
    commands_text = _read_text(args.commands)
    before, after, diagnostics, queries, timings = run_mutate(
        args.page, args.css, commands_text, _options(args, args.dump), paths)
    if before.error or after.error:
        print(f"error: {before.error or after.error}", file=sys.stderr)
        return 1
    for stage, ms in timings:
        print(f"{stage}\t{ms:.1f}", file=sys.stderr)
    for diag in diagnostics:
        print(f"diagnostic\t{diag}", file=sys.stderr)
    sys.stdout.write("--- before ---\n")
    sys.stdout.write(before.dump_text)
    sys.stdout.write("--- after ---\n")
    sys.stdout.write(after.dump_text)
    for path_text, geometry in queries:
        print(f"query {path_text}: {geometry}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "render":
            return _cmd_render(args)
        if args.command == "bench":
            return _cmd_bench(args, parser)
        return _cmd_mutate(args)
    except EngineError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
