"""Incremental tree construction driven by navigation.

Instead of building the whole hierarchy up front, only the initially
presented elements plus everything reachable by one drill-down or roll-up
are constructed; each subsequent operation extends that frontier by one
step. The partial tree is addressed through a virtual layout: every
potential node is a (height, slot) pair whose contents and interval are
computable from the sorted dataset alone, so nodes can be materialized in
any order and still match their full-construction counterparts.

Construction per rendered element set:
* internal siblings rendered: build their parent and its siblings, and
  all their children;
* leaf siblings rendered: only the missing parent level, if any;
* data objects rendered: nothing (everything reachable already exists).

Empty range-variant slots are never materialized.
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass

from .counters import BuildCounters
from .errors import DegenerateRangeError, EmptyRangeError, ParameterError, UnknownResourceError
from .ingest import DataObject, Dataset
from .stats import merge_stats, stats_from_values
from .tree import (
    HETree,
    Interval,
    Node,
    TreeParams,
    leaf_slot_bounds,
    range_slot_of,
    tree_height,
)


def compute_sibling_intervals(low: float, up: float, length: float, n: int) -> list[Interval]:
    """At most n consecutive intervals of the given length from low,
    truncated at up; the final interval is closed."""
    if length <= 0 or low > up:
        raise ParameterError("need low <= up and a positive length")
    intervals: list[Interval] = []
    lower = low
    for _ in range(n):
        upper = min(up, lower + length)
        intervals.append(Interval(lower, upper, upper_closed=(upper == up)))
        if upper == up:
            break
        lower = upper
    return intervals


def constr_sibling_nodes(intervals: list[Interval], parent: Node | None,
                         available: list[DataObject], height: int,
                         counters: BuildCounters | None = None,
                         ids=None) -> list[Node]:
    """Materialize one node per non-empty interval, consuming from the pool.

    Objects are binned by the floor formula over the first interval's
    length; consumed objects are removed from ``available`` in place.
    Leaves sort their data; every built node gets statistics.
    """
    counters = counters if counters is not None else BuildCounters()
    ids = ids if ids is not None else itertools.count(10**9)
    if not intervals:
        return []
    length = intervals[0].length
    bins: list[list[DataObject]] = [[] for _ in intervals]
    leftover: list[DataObject] = []
    last = intervals[-1]
    for obj in available:
        j = math.floor((obj.value - intervals[0].lower) / length) + 1
        if j == len(intervals) + 1 and last.upper_closed and obj.value == last.upper:
            j = len(intervals)
        if 1 <= j <= len(intervals) and intervals[j - 1].contains(obj.value):
            bins[j - 1].append(obj)
        else:
            leftover.append(obj)
    available[:] = leftover
    built: list[Node] = []
    for interval, content in zip(intervals, bins):
        if not content:
            continue
        node = Node(next(ids), interval, height)
        if height == 0:
            node.data = sorted(content, key=lambda o: (o.value, o.subject))
        else:
            node.pending = content
        node.stats = stats_from_values([o.value for o in content])
        node.parent = parent
        counters.node(leaf=height == 0)
        counters.stats_from_scratch += 1
        counters.objects_scanned += len(content)
        built.append(node)
    return built


class _LayoutC:
    """Slot arithmetic for the fixed-size layout over a sorted dataset."""

    variant = "C"

    def __init__(self, dataset: Dataset, leaves: int, degree: int):
        self.dataset = dataset
        self.leaves = leaves
        self.degree = degree
        self.root_height = tree_height(leaves, degree)
        self.bounds = leaf_slot_bounds(len(dataset), leaves)

    def count_at(self, height: int) -> int:
        if height >= self.root_height:
            return 1
        return math.ceil(self.leaves / self.degree ** height)

    def leaf_range(self, height: int, slot: int) -> tuple[int, int]:
        width = self.degree ** height
        first = (slot - 1) * width + 1
        last = min(slot * width, self.leaves)
        return first, last

    def object_range(self, height: int, slot: int) -> tuple[int, int]:
        first, last = self.leaf_range(height, slot)
        return self.bounds[first - 1][0], self.bounds[last - 1][1]

    def slot_objects(self, height: int, slot: int) -> list[DataObject]:
        start, end = self.object_range(height, slot)
        return self.dataset.objects[start:end]

    def is_empty(self, height: int, slot: int) -> bool:
        start, end = self.object_range(height, slot)
        return start >= end

    def node_interval(self, height: int, slot: int) -> Interval:
        start, end = self.object_range(height, slot)
        return Interval(self.dataset.objects[start].value,
                        self.dataset.objects[end - 1].value, upper_closed=True)

    def leaf_slot_of_index(self, index: int) -> int:
        starts = [b[0] for b in self.bounds]
        return bisect.bisect_right(starts, index)

    def leaf_slot_of_value(self, value: float) -> int:
        index = bisect.bisect_left([o.value for o in self.dataset.objects], value)
        return self.leaf_slot_of_index(min(index, len(self.dataset) - 1))


class _LayoutR:
    """Grid arithmetic for the fixed-range layout."""

    variant = "R"

    def __init__(self, dataset: Dataset, leaves: int, degree: int):
        if dataset.minv == dataset.maxv:
            raise DegenerateRangeError(
                "all values are equal; use the content-based variant instead"
            )
        self.dataset = dataset
        self.leaves = leaves
        self.degree = degree
        self.root_height = tree_height(leaves, degree)
        self.rho = (dataset.maxv - dataset.minv) / leaves
        self._values = [o.value for o in dataset.objects]

    def count_at(self, height: int) -> int:
        if height >= self.root_height:
            return 1
        return math.ceil(self.leaves / self.degree ** height)

    def leaf_range(self, height: int, slot: int) -> tuple[int, int]:
        width = self.degree ** height
        first = (slot - 1) * width + 1
        last = min(slot * width, self.leaves)
        return first, last

    def node_interval(self, height: int, slot: int) -> Interval:
        first, last = self.leaf_range(height, slot)
        minv, maxv = self.dataset.minv, self.dataset.maxv
        lower = minv + (first - 1) * self.rho
        if last == self.leaves:
            return Interval(lower, maxv, upper_closed=True)
        return Interval(lower, minv + last * self.rho, upper_closed=False)

    def leaf_slot_of_value(self, value: float) -> int:
        return range_slot_of(value, self.dataset.minv, self.rho, self.leaves)

    def is_empty(self, height: int, slot: int) -> bool:
        interval = self.node_interval(height, slot)
        lo = bisect.bisect_left(self._values, interval.lower)
        if lo >= len(self._values):
            return True
        v = self._values[lo]
        return not interval.contains(v)


@dataclass
class IcoCursor:
    """What the user currently sees in an incremental session."""

    kind: str  # "nodes" | "objects"
    nodes: list[Node]
    focus_leaf: Node | None = None


class IcoState:
    """A partially materialized tree owned by one exploration session."""

    def __init__(self, dataset: Dataset, params: TreeParams):
        if not dataset.sorted:
            raise ParameterError("dataset must be sorted before exploration")
        if params.variant == "C" and len(dataset) < params.leaves:
            raise ParameterError("dataset smaller than the requested leaf count")
        self.dataset = dataset
        self.params = params
        layout_cls = _LayoutC if params.variant == "C" else _LayoutR
        self.layout = layout_cls(dataset, params.leaves, params.degree)
        self.counters = BuildCounters()
        self.nodes: dict[tuple[int, int], Node] = {}
        self.pool: list[DataObject] = list(dataset.objects)
        self._ids = itertools.count()

    # -- slot helpers ------------------------------------------------------

    def sibling_slots(self, height: int, slot: int) -> list[int]:
        degree = self.params.degree
        group = (slot - 1) // degree
        first = group * degree + 1
        last = min(first + degree - 1, self.layout.count_at(height))
        return list(range(first, last + 1))

    def child_slots(self, height: int, slot: int) -> list[int]:
        degree = self.params.degree
        first = (slot - 1) * degree + 1
        last = min(slot * degree, self.layout.count_at(height - 1))
        return list(range(first, last + 1))

    def group_nodes(self, height: int, slots: list[int]) -> list[Node]:
        return [self.nodes[(height, s)] for s in slots if (height, s) in self.nodes]

    def node_by_id(self, node_id: int) -> Node | None:
        for node in self.nodes.values():
            if node.id == node_id:
                return node
        return None

    # -- construction ------------------------------------------------------

    def _make_node(self, height: int, slot: int) -> Node:
        interval = self.layout.node_interval(height, slot)
        node = Node(next(self._ids), interval, height, slot=slot)
        self.nodes[(height, slot)] = node
        self.counters.node(leaf=height == 0)
        return node

    def _fill_from_objects(self, node: Node, objects: list[DataObject]) -> None:
        if node.height == 0:
            node.data = objects
        else:
            node.pending = objects
        node.stats = stats_from_values([o.value for o in objects])
        self.counters.stats_from_scratch += 1
        self.counters.objects_scanned += len(objects)

    def _take_from_pool(self, pool: list[DataObject], height: int, slots: list[int]) -> dict[int, list[DataObject]]:
        """Partition a pool by node slot at the given height, removing hits."""
        width = self.params.degree ** height
        wanted = set(slots)
        taken: dict[int, list[DataObject]] = {s: [] for s in slots}
        rest: list[DataObject] = []
        if self.params.variant == "R":
            for obj in pool:
                leaf_slot = self.layout.leaf_slot_of_value(obj.value)
                slot = (leaf_slot - 1) // width + 1
                if slot in wanted:
                    taken[slot].append(obj)
                else:
                    rest.append(obj)
            pool[:] = rest
        else:
            for slot in slots:
                taken[slot] = self.layout.slot_objects(height, slot)
        return taken

    def _materialize_group(self, height: int, slots: list[int], pool: list[DataObject]) -> list[Node]:
        """Build the missing non-empty nodes among the given sibling slots."""
        missing = [s for s in slots
                   if (height, s) not in self.nodes and not self.layout.is_empty(height, s)]
        if missing:
            contents = self._take_from_pool(pool, height, missing)
            for slot in missing:
                node = self._make_node(height, slot)
                self._fill_from_objects(node, contents[slot])
        return self.group_nodes(height, slots)

    def _build_parent_over(self, group: list[Node]) -> Node:
        """Roll-up construction: the parent aggregates its complete children."""
        height = group[0].height + 1
        parent_slot = (group[0].slot - 1) // self.params.degree + 1
        parent = self._make_node(height, parent_slot)
        parent.children = list(group)
        for child in group:
            child.parent = parent
        parent.stats = merge_stats([c.stats for c in group])
        self.counters.stats_aggregated += 1
        return parent

    def _constr_roll_up(self, group: list[Node]) -> None:
        parent = self._build_parent_over(group)
        siblings = self.sibling_slots(parent.height, parent.slot)
        self._materialize_group(parent.height, siblings, self.pool)

    def _constr_drill_down(self, group: list[Node]) -> None:
        for node in group:
            if node.height == 0 or node.children:
                continue
            slots = self.child_slots(node.height, node.slot)
            source = node.pending if self.params.variant == "R" else self.pool
            children = self._materialize_group(node.height - 1, slots, source)
            node.pending = []
            node.children = children
            for child in children:
                child.parent = node

    def after_render(self, group: list[Node]) -> None:
        """Build everything one operation away from a rendered node set."""
        if not group:
            return
        head = group[0]
        if head.height < self.layout.root_height and head.parent is None:
            self._constr_roll_up(group)
        if head.height > 0:
            self._constr_drill_down(group)

    # -- scenario entry points ----------------------------------------------

    def locate_resource(self, resource: str) -> DataObject:
        for obj in self.dataset.objects:
            if obj.subject == resource:
                return obj
        raise UnknownResourceError(f"resource {resource!r} not in dataset")

    def leaf_slot_for(self, obj: DataObject) -> int:
        if self.params.variant == "R":
            return self.layout.leaf_slot_of_value(obj.value)
        index = self.dataset.objects.index(obj)
        return self.layout.leaf_slot_of_index(index)

    def init_res(self, resource: str) -> IcoCursor:
        obj = self.locate_resource(resource)
        slot = self.leaf_slot_for(obj)
        group = self._materialize_group(0, self.sibling_slots(0, slot), self.pool)
        focus = self.nodes[(0, slot)]
        return IcoCursor("objects", group, focus_leaf=focus)

    def init_bsc(self) -> IcoCursor:
        root = self._materialize_group(self.layout.root_height, [1], self.pool)
        self.after_render(root)
        return IcoCursor("nodes", root)

    def covering_slot(self, lower: float, upper: float) -> tuple[int, int]:
        """Deepest non-empty internal slot whose interval covers the range."""
        target = Interval(lower, upper, upper_closed=True)
        height, slot = self.layout.root_height, 1
        while height > 1:
            step = None
            for child in self.child_slots(height, slot):
                if self.layout.is_empty(height - 1, child):
                    continue
                if self.layout.node_interval(height - 1, child).covers(target):
                    step = child
                    break
            if step is None:
                break
            height, slot = height - 1, step
        return height, slot

    def init_ran(self, lower: float, upper: float) -> IcoCursor:
        lower = max(lower, self.dataset.minv)
        upper = min(upper, self.dataset.maxv)
        if lower > upper:
            raise EmptyRangeError("range does not intersect the data")
        height, slot = self.covering_slot(lower, upper)
        interest = self._materialize_group(height - 1, self.child_slots(height, slot), self.pool)
        self.after_render(interest)
        return IcoCursor("nodes", interest)

    def init(self, scenario: str, resource: str | None = None,
             lower: float | None = None, upper: float | None = None) -> IcoCursor:
        if scenario == "RES":
            return self.init_res(resource)
        if scenario == "RAN":
            return self.init_ran(lower, upper)
        return self.init_bsc()

    # -- operation hooks -----------------------------------------------------

    def render_children(self, node: Node) -> IcoCursor:
        if node.height == 0:
            return IcoCursor("objects", [node], focus_leaf=node)
        cursor = IcoCursor("nodes", list(node.children))
        self.after_render(cursor.nodes)
        return cursor

    def render_parent_group(self, node: Node) -> IcoCursor:
        parent = node.parent
        if parent is None:
            raise AssertionError("roll-up target missing from the partial tree")
        group = self.group_nodes(parent.height, self.sibling_slots(parent.height, parent.slot))
        cursor = IcoCursor("nodes", group)
        self.after_render(group)
        return cursor

    def sibling_group(self, node: Node) -> list[Node]:
        return self.group_nodes(node.height, self.sibling_slots(node.height, node.slot))

    # -- views over the partial structure -------------------------------------

    def materialized(self) -> list[Node]:
        return list(self.nodes.values())

    def as_tree(self) -> HETree:
        levels: list[list[Node]] = [[] for _ in range(self.layout.root_height + 1)]
        for (height, _), node in sorted(self.nodes.items()):
            levels[height].append(node)
        root = self.nodes.get((self.layout.root_height, 1))
        if root is None:
            root = Node(-1, Interval(self.dataset.minv, self.dataset.maxv), self.layout.root_height)
        return HETree(self.params, root, levels, self.dataset, mode="incremental")


def ico_init(dataset: Dataset, leaves: int, degree: int, scenario: str,
             variant: str = "R", resource: str | None = None,
             lower: float | None = None, upper: float | None = None) -> tuple[IcoState, IcoCursor]:
    state = IcoState(dataset, TreeParams(variant, leaves, degree))
    cursor = state.init(scenario, resource=resource, lower=lower, upper=upper)
    return state, cursor


def ico_step(state: IcoState, cursor: IcoCursor, op: str,
             node_id: int | None = None) -> IcoCursor:
    """Apply one navigation operation to a cursor, constructing whatever
    becomes reachable; `op` is "drill" (with a rendered node id) or "roll"."""
    if op == "drill":
        if cursor.kind != "nodes":
            raise ParameterError("cannot drill below data objects")
        target = next((n for n in cursor.nodes if n.id == node_id), None)
        if target is None:
            raise ParameterError(f"node {node_id} is not currently rendered")
        return state.render_children(target)
    if op != "roll":
        raise ParameterError(f"unknown operation {op!r}")
    if cursor.kind == "objects":
        group = state.sibling_group(cursor.focus_leaf)
        state.after_render(group)
        return IcoCursor("nodes", group)
    return state.render_parent_group(cursor.nodes[0])
