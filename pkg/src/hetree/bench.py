"""Desk-scale benchmark harness.

Measures full-construction time against dataset size and contrasts the
first-response work of full construction (the whole tree) with the
incremental initial-node counts per scenario. Counts are deterministic
under a fixed seed; timings are medians over the requested repeats.
"""

from __future__ import annotations

import csv
import gc
import io
import statistics
import time
from dataclasses import dataclass

from .incremental import IcoState
from .params import estimate_params
from .synth import synthetic_dataset
from .tree import TreeParams, build_hetree

CSV_COLUMNS = [
    "size",
    "dist",
    "variant",
    "leaves",
    "degree",
    "construction_ms",
    "first_response_nodes_full",
    "first_response_nodes_ico",
    "res_init_nodes",
    "ran_init_nodes",
    "bsc_init_nodes",
]


@dataclass
class BenchRow:
    size: int
    dist: str
    variant: str
    leaves: int
    degree: int
    construction_ms: float
    first_response_nodes_full: int
    first_response_nodes_ico: int
    res_init_nodes: int
    ran_init_nodes: int
    bsc_init_nodes: int

    def as_list(self) -> list:
        return [getattr(self, c) for c in CSV_COLUMNS]


def _init_count(dataset, params: TreeParams, scenario: str, **kwargs) -> int:
    state = IcoState(dataset, params)
    state.init(scenario, **kwargs)
    return state.counters.nodes_built


def bench_one(size: int, dist: str, variant: str, repeat: int, seed: int) -> BenchRow:
    dataset = synthetic_dataset(size, dist, seed)
    params = estimate_params(size, (10, 50), variant)
    gc.collect()  # level the allocator state between sizes
    build_hetree(dataset, params)  # warm-up: fault in fresh arenas untimed
    timings = []
    tree = None
    counters = None
    for _ in range(max(repeat, 1)):
        tree = counters = None
        gc.collect()  # pay the deferred collection outside the timed window
        t0 = time.perf_counter()
        tree, counters = build_hetree(dataset, params)
        timings.append((time.perf_counter() - t0) * 1000.0)

    mid = dataset.objects[len(dataset) // 2]
    span = (dataset.maxv - dataset.minv) / 10.0
    res_nodes = _init_count(dataset, params, "RES", resource=mid.subject)
    ran_nodes = _init_count(dataset, params, "RAN",
                            lower=mid.value, upper=min(dataset.maxv, mid.value + span))
    bsc_nodes = _init_count(dataset, params, "BSC")

    return BenchRow(
        size=size,
        dist=dist,
        variant=variant,
        leaves=params.leaves,
        degree=params.degree,
        construction_ms=statistics.median(timings),
        first_response_nodes_full=counters.nodes_built,
        first_response_nodes_ico=bsc_nodes,
        res_init_nodes=res_nodes,
        ran_init_nodes=ran_nodes,
        bsc_init_nodes=bsc_nodes,
    )


def run_bench(sizes: list[int], dist: str = "uniform", variant: str = "C",
              repeat: int = 3, seed: int = 0) -> list[BenchRow]:
    return [bench_one(size, dist, variant, repeat, seed) for size in sizes]


def rows_to_csv(rows: list[BenchRow]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.as_list())
    return out.getvalue()


ADAPT_CSV_COLUMNS = [
    "size", "dist", "variant", "leaves", "degree", "case", "k",
    "leaves_scratch", "leaves_derived", "internals_scratch", "internals_derived",
    "stats_leaves_scratch", "stats_leaves_derived",
    "stats_internals_scratch", "stats_internals_derived", "exact_reuse",
]

# One representative reshape per case, relative to the starting (leaves, degree).
_ADAPT_MOVES = [
    ("degree", lambda leaves, d: d * d),
    ("degree", lambda leaves, d: 5 * d),
    ("degree", lambda leaves, d: d + 1),
    ("leaves", lambda leaves, d: leaves * 2),
    ("leaves", lambda leaves, d: max(leaves // d, 1)),
    ("leaves", lambda leaves, d: max(leaves - 3, 1)),
]


def run_adapt_bench(sizes: list[int], dist: str = "uniform", variant: str = "C",
                    seed: int = 0) -> str:
    """Apply a fixed battery of reshapes per size and dump the reports."""
    from .adaptive import adapt

    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(ADAPT_CSV_COLUMNS)
    for size in sizes:
        dataset = synthetic_dataset(size, dist, seed)
        params = estimate_params(size, (10, 50), variant)
        for knob, move in _ADAPT_MOVES:
            value = move(params.leaves, params.degree)
            if (knob == "degree" and value == params.degree) or \
               (knob == "leaves" and value == params.leaves):
                continue
            tree, _ = build_hetree(dataset, params)
            kwargs = {"new_degree": value} if knob == "degree" else {"new_leaves": value}
            _, report = adapt(tree, **kwargs)
            writer.writerow([
                size, dist, variant, params.leaves, params.degree,
                report.case.kind, report.case.k if report.case.k is not None else "",
                report.leaves_scratch, report.leaves_derived,
                report.internals_scratch, report.internals_derived,
                report.stats_leaves_scratch, report.stats_leaves_derived,
                report.stats_internals_scratch, report.stats_internals_derived,
                int(report.exact_reuse),
            ])
    return out.getvalue()
