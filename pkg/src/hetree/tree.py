"""The aggregation tree: data model and full bottom-up construction.

Two leaf layouts are supported over the same ordered set S:

* variant C (content-based): every leaf holds lam or lam-1 objects,
  lam = ceil(|S| / leaves); the lam-sized leaves come first.
* variant R (range-based): every leaf covers an equal value range of
  length rho = (maxv - minv) / leaves; objects are placed by
  floor((o - minv) / rho), clamped so the maximum lands in the last leaf.

Internal levels are built the same way for both: group `degree`
consecutive nodes per parent, the last parent takes the remainder, and
repeat until a single root remains. Statistics are computed during
construction: leaves from their values, internal nodes by merging child
aggregates.
"""

from __future__ import annotations

import gc
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

from .counters import BuildCounters
from .errors import DegenerateRangeError, ParameterError
from .ingest import DataObject, Dataset
from .stats import EMPTY_STATS, NodeStats, merge_stats, stats_from_values

SCHEMA = "hetree-v1"


class Interval(NamedTuple):
    """A value interval, closed or half-open at the upper end."""

    lower: float
    upper: float
    upper_closed: bool = True

    @property
    def length(self) -> float:
        return abs(self.upper - self.lower)

    def contains(self, value: float) -> bool:
        if self.upper_closed:
            return self.lower <= value <= self.upper
        return self.lower <= value < self.upper

    def covers(self, other: "Interval") -> bool:
        if other.lower < self.lower:
            return False
        if other.upper < self.upper:
            return True
        return other.upper == self.upper and (self.upper_closed or not other.upper_closed)

    def to_json(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "upper_closed": self.upper_closed}


class Node:
    """One tree node: an interval plus either children or sorted leaf data."""

    __slots__ = ("id", "interval", "height", "parent", "children", "data", "stats", "pending", "slot")

    def __init__(self, node_id: int, interval: Interval, height: int, slot: int = 0):
        self.id = node_id
        self.interval = interval
        self.height = height
        self.parent: Node | None = None
        self.children: list[Node] = []
        self.data: list[DataObject] = []
        self.stats: NodeStats = EMPTY_STATS
        # Objects enclosed but not yet pushed down to children; only used
        # while a tree is being grown incrementally.
        self.pending: list[DataObject] = []
        self.slot = slot

    @property
    def is_leaf(self) -> bool:
        return self.height == 0

    def __repr__(self) -> str:  # pragma: no cover
        return f"Node(id={self.id}, h={self.height}, I=[{self.interval.lower}, {self.interval.upper}])"


@dataclass(frozen=True)
class TreeParams:
    variant: str  # "C" | "R"
    leaves: int
    degree: int

    def __post_init__(self):
        if self.variant not in ("C", "R"):
            raise ParameterError(f"unknown variant {self.variant!r}")
        if self.leaves < 1:
            raise ParameterError("leaf count must be positive")
        if self.degree < 2:
            raise ParameterError("degree must be at least 2")

    def lam(self, size: int) -> int:
        return math.ceil(size / self.leaves)

    def rho(self, minv: float, maxv: float) -> float:
        return abs(maxv - minv) / self.leaves

    def to_json(self) -> dict:
        return {"variant": self.variant, "leaves": self.leaves, "degree": self.degree}


@dataclass
class HETree:
    params: TreeParams
    root: Node
    levels: list[list[Node]]  # levels[h] = ordered nodes at height h
    dataset: Dataset
    mode: str = "full"
    _ids: Iterator[int] = field(default_factory=itertools.count, repr=False)

    @property
    def height(self) -> int:
        return len(self.levels) - 1

    def next_id(self) -> int:
        return next(self._ids)

    def nodes(self) -> Iterator[Node]:
        for level in self.levels:
            yield from level

    def node_by_id(self, node_id: int) -> Node | None:
        for node in self.nodes():
            if node.id == node_id:
                return node
        return None

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "params": self.params.to_json(),
            "mode": self.mode,
            "size": len(self.dataset),
            "root": self.root.id,
            "levels": [[n.id for n in level] for level in self.levels],
            "nodes": [
                {
                    "id": n.id,
                    "height": n.height,
                    "interval": n.interval.to_json(),
                    "stats": n.stats.to_json(),
                    "children": [c.id for c in n.children],
                }
                for n in self.nodes()
            ],
        }


def tree_height(leaves: int, degree: int) -> int:
    """Height of a full-construction tree: ceil(log_degree(leaves)), with a
    root kept above a single leaf."""
    if leaves == 1:
        return 1
    height = 0
    span = 1
    while span < leaves:
        span *= degree
        height += 1
    return height


def leaf_slot_sizes(size: int, leaves: int) -> list[int]:
    """Content layout: the leftmost k = leaves - (lam*leaves - size) slots
    hold lam objects, the rest lam - 1."""
    lam = math.ceil(size / leaves)
    k = leaves - (lam * leaves - size)
    return [lam if i < k else lam - 1 for i in range(leaves)]


def leaf_slot_bounds(size: int, leaves: int) -> list[tuple[int, int]]:
    """Half-open index ranges [start, end) into S for each content slot."""
    bounds = []
    start = 0
    for width in leaf_slot_sizes(size, leaves):
        bounds.append((start, start + width))
        start += width
    return bounds


def range_slot_of(value: float, minv: float, rho: float, leaves: int) -> int:
    """1-based range slot: floor((o - minv) / rho) + 1, clamped to [1, leaves]."""
    slot = math.floor((value - minv) / rho) + 1
    return min(max(slot, 1), leaves)


def range_slot_interval(index: int, minv: float, maxv: float, rho: float, leaves: int) -> Interval:
    lower = minv + (index - 1) * rho
    if index == leaves:
        return Interval(lower, maxv, upper_closed=True)
    return Interval(lower, minv + index * rho, upper_closed=False)


def _require_sorted(dataset: Dataset) -> None:
    if not dataset.sorted:
        raise ParameterError("dataset must be sorted before construction")


def _new_leaf(tree_ids: Iterator[int], interval: Interval, data: list[DataObject],
              counters: BuildCounters, slot: int, values: list[float] | None = None) -> Node:
    node = Node(next(tree_ids), interval, height=0, slot=slot)
    node.data = data
    if data:
        if values is None:
            values = [o.value for o in data]
        node.stats = stats_from_values(values)
        counters.stats_from_scratch += 1
        counters.objects_scanned += len(data)
    counters.node(leaf=True)
    return node


# Above this size, leaf statistics and range placement go through numpy.
_BULK_THRESHOLD = 4096


def _bulk_leaf_stats(dataset: Dataset, bounds: list[tuple[int, int]],
                     counters: BuildCounters) -> list[NodeStats] | None:
    if len(dataset) < _BULK_THRESHOLD:
        return None
    from .stats import bulk_stats

    stats = bulk_stats(dataset.values(), bounds)
    for s in stats:
        if not s.is_empty:
            counters.stats_from_scratch += 1
            counters.objects_scanned += s.count
    return stats


def _build_leaves_c(dataset: Dataset, params: TreeParams, ids: Iterator[int],
                    counters: BuildCounters) -> list[Node]:
    if len(dataset) < params.leaves:
        raise ParameterError(
            f"need at least {params.leaves} objects for {params.leaves} leaves, got {len(dataset)}"
        )
    values = dataset.values()
    bounds = leaf_slot_bounds(len(dataset), params.leaves)
    bulk = _bulk_leaf_stats(dataset, bounds, counters)
    leaves = []
    for slot, (start, end) in enumerate(bounds, start=1):
        interval = Interval(values[start], values[end - 1], upper_closed=True)
        if bulk is None:
            node = _new_leaf(ids, interval, dataset.objects[start:end], counters,
                             slot, values[start:end])
        else:
            node = Node(next(ids), interval, height=0, slot=slot)
            node.data = dataset.objects[start:end]
            node.stats = bulk[slot - 1]
            counters.node(leaf=True)
        leaves.append(node)
    return leaves


def _range_slot_bounds(dataset: Dataset, rho: float, leaf_count: int) -> list[tuple[int, int]]:
    """Index ranges per range slot; contiguous because S is value-sorted."""
    if len(dataset) >= _BULK_THRESHOLD:
        import numpy as np

        array = np.asarray(dataset.values(), dtype=np.float64)
        slots = np.floor((array - dataset.minv) / rho).astype(np.int64) + 1
        np.clip(slots, 1, leaf_count, out=slots)
        counts = np.bincount(slots, minlength=leaf_count + 1)[1:]
    else:
        counts = [0] * leaf_count
        minv = dataset.minv
        for value in dataset.values():
            counts[range_slot_of(value, minv, rho, leaf_count) - 1] += 1
    bounds = []
    start = 0
    for count in counts:
        bounds.append((start, start + int(count)))
        start += int(count)
    return bounds


def _build_leaves_r(dataset: Dataset, params: TreeParams, ids: Iterator[int],
                    counters: BuildCounters) -> list[Node]:
    if dataset.minv == dataset.maxv:
        raise DegenerateRangeError(
            "all values are equal; use the content-based variant instead"
        )
    rho = params.rho(dataset.minv, dataset.maxv)
    bounds = _range_slot_bounds(dataset, rho, params.leaves)
    bulk = _bulk_leaf_stats(dataset, bounds, counters)
    values = dataset.values()
    leaves = []
    for i, (start, end) in enumerate(bounds, start=1):
        interval = range_slot_interval(i, dataset.minv, dataset.maxv, rho, params.leaves)
        if bulk is None:
            node = _new_leaf(ids, interval, dataset.objects[start:end], counters,
                             i, values[start:end])
        else:
            node = Node(next(ids), interval, height=0, slot=i)
            node.data = dataset.objects[start:end]
            node.stats = bulk[i - 1]
            counters.node(leaf=True)
        leaves.append(node)
    return leaves


def _build_parent_level(level: Sequence[Node], degree: int, ids: Iterator[int],
                        counters: BuildCounters) -> list[Node]:
    p_num = math.ceil(len(level) / degree)
    parents = []
    begin = 0
    for p in range(p_num):
        width = degree if p < p_num - 1 else len(level) - begin
        group = level[begin:begin + width]
        interval = Interval(
            group[0].interval.lower,
            group[-1].interval.upper,
            upper_closed=group[-1].interval.upper_closed,
        )
        parent = Node(next(ids), interval, height=group[0].height + 1, slot=p + 1)
        parent.children = list(group)
        for child in group:
            child.parent = parent
        parent.stats = merge_stats([c.stats for c in group])
        counters.stats_aggregated += 1
        counters.node(leaf=False)
        parents.append(parent)
        begin += width
    return parents


def compute_leaf_stats(leaf: Node) -> NodeStats:
    """Count, extremes, mean and population variance of a leaf's contents;
    an empty leaf yields the empty marker."""
    return stats_from_values([o.value for o in leaf.data])


def constr_internal_nodes(level: Sequence[Node], degree: int,
                          ids: Iterator[int] | None = None,
                          counters: BuildCounters | None = None) -> tuple[Node, list[list[Node]]]:
    """Group `degree` consecutive nodes per parent, repeating up to a root.

    Returns the root and the list of levels above the input (bottom-up).
    A single input node still gets a root built above it.
    """
    if not level:
        raise ParameterError("cannot build internal nodes over an empty level")
    ids = ids if ids is not None else itertools.count(10**9)
    counters = counters if counters is not None else BuildCounters()
    levels_above: list[list[Node]] = []
    current = list(level)
    while True:
        parents = _build_parent_level(current, degree, ids, counters)
        levels_above.append(parents)
        if len(parents) == 1:
            return parents[0], levels_above
        current = parents


def _assemble(dataset: Dataset, params: TreeParams, leaves: list[Node],
              ids: Iterator[int], counters: BuildCounters) -> HETree:
    root, above = constr_internal_nodes(leaves, params.degree, ids, counters)
    return HETree(params, root, [leaves] + above, dataset, mode="full", _ids=ids)


class _gc_paused:
    """Cycle collection off during bulk node allocation; the collector
    otherwise rescans the whole dataset graph every few thousand nodes."""

    def __enter__(self):
        self._was_enabled = gc.isenabled()
        gc.disable()

    def __exit__(self, *exc):
        if self._was_enabled:
            gc.enable()


def build_hetree_c(dataset: Dataset, leaves: int, degree: int) -> tuple[HETree, BuildCounters]:
    """Fixed-size grouping over a sorted dataset."""
    _require_sorted(dataset)
    params = TreeParams("C", leaves, degree)
    counters = BuildCounters()
    ids = itertools.count()
    with _gc_paused():
        level = _build_leaves_c(dataset, params, ids, counters)
        tree = _assemble(dataset, params, level, ids, counters)
    return tree, counters


def build_hetree_r(dataset: Dataset, leaves: int, degree: int) -> tuple[HETree, BuildCounters]:
    """Fixed-range grouping over a sorted dataset."""
    _require_sorted(dataset)
    params = TreeParams("R", leaves, degree)
    counters = BuildCounters()
    ids = itertools.count()
    with _gc_paused():
        level = _build_leaves_r(dataset, params, ids, counters)
        tree = _assemble(dataset, params, level, ids, counters)
    return tree, counters


def build_hetree(dataset: Dataset, params: TreeParams) -> tuple[HETree, BuildCounters]:
    if params.variant == "C":
        return build_hetree_c(dataset, params.leaves, params.degree)
    return build_hetree_r(dataset, params.leaves, params.degree)
