"""Command-line front door.

Subcommands: build a tree and dump it as JSON, replay an exploration
script, run the benchmark harness, or serve the HTTP API.

Exit codes: 0 ok, 2 usage, 3 data error, 4 script error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import explore
from .adaptive import adapt
from .bench import rows_to_csv, run_bench
from .errors import DataError, HETreeError, ParameterError
from .ingest import parse_csv, parse_ntriples, sort_dataset
from .params import estimate_params
from .synth import DISTRIBUTIONS
from .tree import TreeParams, build_hetree

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_SCRIPT = 4


def _load_dataset(args):
    with open(args.input, "rb") as handle:
        payload = handle.read()
    if args.format == "ntriples":
        dataset = parse_ntriples(payload, args.predicate)
    else:
        dataset = parse_csv(payload)
    return sort_dataset(dataset)


def _resolve_params(args, size: int) -> TreeParams:
    if args.auto:
        lam_min, lam_max = args.auto
        return estimate_params(size, (lam_min, lam_max), args.variant)
    if args.leaves is None or args.degree is None:
        raise ParameterError("give --leaves and --degree, or --auto MIN MAX")
    return TreeParams(args.variant, args.leaves, args.degree)


def _cmd_build(args) -> int:
    dataset = _load_dataset(args)
    params = _resolve_params(args, len(dataset))
    t0 = time.perf_counter()
    tree, counters = build_hetree(dataset, params)
    elapsed_ms = (time.perf_counter() - t0) * 1000.0
    document = tree.to_json()
    document["timing_ms"] = elapsed_ms
    document["counters"] = counters.snapshot()
    text = json.dumps(document, indent=None if args.compact else 2)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)
    print(f"built variant={params.variant} leaves={params.leaves} "
          f"degree={params.degree} nodes={counters.nodes_built} "
          f"in {elapsed_ms:.3f} ms", file=sys.stderr)
    return EXIT_OK


class ScriptError(Exception):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _run_script(args, dataset, params, lines) -> int:
    session = None
    for line_no, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        op = words[0].lower()
        try:
            before = 0 if session is None else session.counters.nodes_built
            if op == "start":
                scenario = words[1].upper()
                if scenario == "RES":
                    start = explore.StartingPoint.res(words[2])
                elif scenario == "RAN":
                    start = explore.StartingPoint.ran(float(words[2]), float(words[3]))
                else:
                    start = explore.StartingPoint.bsc()
                session = explore.start_session(dataset, start, params,
                                                incremental=args.incremental)
            elif op == "drill":
                index = int(words[1])
                if session.cur.kind != "nodes" or not 1 <= index <= len(session.cur.nodes):
                    raise ScriptError(line_no, f"no rendered node #{index}")
                explore.drill_down(session, session.cur.nodes[index - 1].id)
            elif op == "rollup":
                explore.roll_up(session)
            elif op == "adapt":
                knob, value = words[1].split("=")
                kwargs = {"new_degree": int(value)} if knob == "degree" else \
                         {"new_leaves": int(value)}
                _, report = adapt(session.tree, **kwargs)
                session.cur = explore.RenderedSet.of_nodes(list(session.tree.root.children))
                print(f"adaptation report: {json.dumps(report.to_json())}")
            else:
                raise ScriptError(line_no, f"unknown operation {op!r}")
        except ScriptError:
            raise
        except (HETreeError, IndexError, ValueError) as exc:
            raise ScriptError(line_no, str(exc)) from exc
        built = session.counters.nodes_built - before
        view = explore.current_view(session)
        print(f"== {line} (nodes built this step: {built})")
        print(json.dumps(view))
    if session is not None:
        print(f"final counters: {json.dumps(session.counters.snapshot())}")
    return EXIT_OK


def _cmd_explore(args) -> int:
    dataset = _load_dataset(args)
    params = _resolve_params(args, len(dataset))
    with open(args.script, encoding="utf-8") as handle:
        lines = handle.readlines()
    return _run_script(args, dataset, params, lines)


def _cmd_bench(args) -> int:
    sizes = [int(float(token)) for token in args.sizes.split(",")]
    if args.mode == "adapt":
        from .bench import run_adapt_bench

        sys.stdout.write(run_adapt_bench(sizes, args.dist, args.variant, args.seed))
        return EXIT_OK
    rows = run_bench(sizes, args.dist, args.variant, args.repeat, args.seed)
    sys.stdout.write(rows_to_csv(rows))
    return EXIT_OK


def _cmd_serve(args) -> int:  # pragma: no cover
    from .service import ServiceSettings, main

    main(port=args.port, settings=ServiceSettings(session_ttl_seconds=args.ttl,
                                                  ui_dir=args.ui))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetree",
        description="Build, explore, reshape and benchmark aggregation hierarchies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input_opts(p):
        p.add_argument("--input", required=True, help="input data file")
        p.add_argument("--format", choices=["ntriples", "csv"], default="ntriples")
        p.add_argument("--predicate", help="predicate filter for N-Triples input")
        p.add_argument("--variant", choices=["C", "R"], default="C")
        p.add_argument("--leaves", type=int)
        p.add_argument("--degree", type=int)
        p.add_argument("--auto", nargs=2, type=int, metavar=("MIN", "MAX"),
                       help="derive leaves/degree from per-leaf object bounds")

    p_build = sub.add_parser("build", help="build a tree, print JSON and timing")
    add_input_opts(p_build)
    p_build.add_argument("--output", help="write the tree JSON here instead of stdout")
    p_build.add_argument("--compact", action="store_true")
    p_build.set_defaults(func=_cmd_build)

    p_explore = sub.add_parser("explore", help="replay a script of operations")
    add_input_opts(p_explore)
    p_explore.add_argument("--script", required=True,
                           help="file with lines: start bsc|res IRI|ran LO HI, "
                                "drill K, rollup, adapt degree=D|leaves=L")
    p_explore.add_argument("--incremental", action="store_true")
    p_explore.set_defaults(func=_cmd_explore)

    p_bench = sub.add_parser(
        "bench",
        help=f"benchmark; CSV columns: size,dist,variant,leaves,degree,"
             f"construction_ms,first_response_nodes_full,first_response_nodes_ico,"
             f"res_init_nodes,ran_init_nodes,bsc_init_nodes",
    )
    p_bench.add_argument("--sizes", required=True, help="comma list, e.g. 1e3,1e4")
    p_bench.add_argument("--dist", choices=list(DISTRIBUTIONS), default="uniform")
    p_bench.add_argument("--variant", choices=["C", "R"], default="C")
    p_bench.add_argument("--repeat", type=int, default=3)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--mode", choices=["construct", "adapt"], default="construct",
                         help="adapt: dump per-case reshaping reports as CSV")
    p_bench.set_defaults(func=_cmd_bench)

    p_serve = sub.add_parser("serve", help="run the HTTP exploration service")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--ttl", type=float, default=30 * 60,
                         help="idle session eviction, seconds")
    p_serve.add_argument("--ui", help="directory with the built web client; served at /ui")
    p_serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScriptError as exc:
        print(f"script error: {exc}", file=sys.stderr)
        return EXIT_SCRIPT
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except HETreeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
