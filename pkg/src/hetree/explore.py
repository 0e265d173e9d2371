"""Exploration sessions: scenario start points, drill-down and roll-up.

Rendering always shows one maximal sibling group (nodes sharing a parent,
or the root alone) or the data objects of a single leaf. Three starting
scenarios are supported:

* BSC: top-down from the root.
* RES: from the leaf containing a named resource, bottom-up.
* RAN: from the children of the deepest non-empty internal node whose
  interval covers a requested value range.

Sessions run over a fully built tree or grow one incrementally; the
operations behave identically, except that an incremental basic-scenario
session presents the root itself first (the prefetch frontier is then one
operation wide on either side).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .counters import BuildCounters
from .errors import (
    EmptyRangeError,
    ExplorationError,
    StaleOperationError,
    TopOfTreeError,
    UnknownResourceError,
)
from .incremental import IcoCursor, IcoState
from .ingest import DataObject, Dataset
from .tree import HETree, Interval, Node, TreeParams, build_hetree, leaf_slot_bounds

_session_ids = itertools.count(1)


@dataclass(frozen=True)
class StartingPoint:
    scenario: str  # "BSC" | "RES" | "RAN"
    lower: float | None = None
    upper: float | None = None
    resource: str | None = None

    @staticmethod
    def bsc() -> "StartingPoint":
        return StartingPoint("BSC")

    @staticmethod
    def res(resource: str) -> "StartingPoint":
        return StartingPoint("RES", resource=resource)

    @staticmethod
    def ran(lower: float, upper: float) -> "StartingPoint":
        return StartingPoint("RAN", lower=lower, upper=upper)


@dataclass
class RenderedSet:
    kind: str  # "nodes" | "objects"
    nodes: list[Node] = field(default_factory=list)
    objects: list[DataObject] = field(default_factory=list)
    focus_leaf: Node | None = None

    @staticmethod
    def of_nodes(nodes: list[Node]) -> "RenderedSet":
        return RenderedSet("nodes", nodes=nodes)

    @staticmethod
    def of_leaf(leaf: Node) -> "RenderedSet":
        return RenderedSet("objects", objects=list(leaf.data), focus_leaf=leaf)


class ExplorationSession:
    """One user's navigation over one tree; operations are serialized."""

    def __init__(self, tree: HETree, start: StartingPoint,
                 state: IcoState | None = None, counters: BuildCounters | None = None):
        self.id = next(_session_ids)
        self.tree = tree
        self.start = start
        self.state = state
        self.counters = counters if counters is not None else BuildCounters()
        self.cur: RenderedSet = RenderedSet("nodes")
        self.history: list[tuple[str, object]] = []

    @property
    def incremental(self) -> bool:
        return self.state is not None


def _clamp_range(dataset: Dataset, start: StartingPoint) -> tuple[float, float]:
    lower = max(dataset.minv, start.lower)
    upper = min(dataset.maxv, start.upper)
    if lower > upper:
        raise EmptyRangeError("range does not intersect the data")
    return lower, upper


def _full_leaf_of_resource(tree: HETree, resource: str) -> Node:
    obj = None
    for candidate in tree.dataset.objects:
        if candidate.subject == resource:
            obj = candidate
            break
    if obj is None:
        raise UnknownResourceError(f"resource {resource!r} not in dataset")
    if tree.params.variant == "C":
        index = tree.dataset.objects.index(obj)
        for slot, (lo, hi) in enumerate(leaf_slot_bounds(len(tree.dataset), tree.params.leaves)):
            if lo <= index < hi:
                return tree.levels[0][slot]
        raise AssertionError("index outside the leaf layout")
    for leaf in tree.levels[0]:
        if obj in leaf.data:
            return leaf
    raise AssertionError("object missing from range leaves")


def _full_covering_node(tree: HETree, lower: float, upper: float) -> Node:
    target = Interval(lower, upper, upper_closed=True)
    node = tree.root
    while node.height > 1:
        step = None
        for child in node.children:
            if child.height >= 1 and not child.stats.is_empty and child.interval.covers(target):
                step = child
                break
        if step is None:
            break
        node = step
    return node


def _start_full(tree: HETree, start: StartingPoint) -> RenderedSet:
    if start.scenario == "BSC":
        if not tree.root.children:
            return RenderedSet.of_nodes([tree.root])
        return RenderedSet.of_nodes(list(tree.root.children))
    if start.scenario == "RES":
        return RenderedSet.of_leaf(_full_leaf_of_resource(tree, start.resource))
    lower, upper = _clamp_range(tree.dataset, start)
    covering = _full_covering_node(tree, lower, upper)
    return RenderedSet.of_nodes(list(covering.children))


def _cursor_to_rendered(cursor: IcoCursor) -> RenderedSet:
    if cursor.kind == "objects":
        return RenderedSet.of_leaf(cursor.focus_leaf)
    return RenderedSet.of_nodes(cursor.nodes)


def start_session(source, start: StartingPoint, params: TreeParams | None = None,
                  incremental: bool = False) -> ExplorationSession:
    """Open a session over a built tree or a dataset.

    With ``incremental`` the construction is delegated to the incremental
    builder and only the needed nodes exist; otherwise a full tree is
    built up front (or reused if ``source`` is already a tree).
    """
    if incremental:
        if not isinstance(source, Dataset):
            raise ExplorationError("incremental sessions start from a dataset")
        state = IcoState(source, params)
        if start.scenario == "RAN":
            _clamp_range(source, start)
        cursor = state.init(start.scenario, resource=start.resource,
                            lower=start.lower, upper=start.upper)
        session = ExplorationSession(state.as_tree(), start, state=state,
                                     counters=state.counters)
        session.cur = _cursor_to_rendered(cursor)
    else:
        if isinstance(source, HETree):
            tree = source
            counters = BuildCounters()
        else:
            tree, counters = build_hetree(source, params)
        session = ExplorationSession(tree, start, counters=counters)
        session.cur = _start_full(tree, start)
    session.history.append(("start", (start.scenario, start.resource, start.lower, start.upper)))
    return session


def _sibling_group(session: ExplorationSession, node: Node) -> list[Node]:
    if session.incremental:
        return session.state.sibling_group(node)
    if node.parent is None:
        return [node]
    return list(node.parent.children)


def drill_down(session: ExplorationSession, node_id: int) -> RenderedSet:
    """Focus on one rendered node and render its children (or its data)."""
    if session.cur.kind != "nodes":
        raise ExplorationError("cannot drill below data objects")
    target = next((n for n in session.cur.nodes if n.id == node_id), None)
    if target is None:
        raise StaleOperationError(f"node {node_id} is not currently rendered")
    if target.is_leaf:
        rendered = RenderedSet.of_leaf(target)
    else:
        if session.incremental:
            cursor = session.state.render_children(target)
            rendered = _cursor_to_rendered(cursor)
        else:
            rendered = RenderedSet.of_nodes(list(target.children))
    index = session.cur.nodes.index(target)
    session.cur = rendered
    session.history.append(("drill", index + 1))
    return rendered


def roll_up(session: ExplorationSession) -> RenderedSet:
    """Render the parent group of what is currently shown."""
    cur = session.cur
    if cur.kind == "objects":
        leaf = cur.focus_leaf
        group = _sibling_group(session, leaf)
        if session.incremental:
            session.state.after_render(group)
        rendered = RenderedSet.of_nodes(group)
    else:
        head = cur.nodes[0]
        if head.parent is None:
            raise TopOfTreeError("already at the top of the tree")
        if session.incremental:
            cursor = session.state.render_parent_group(head)
            rendered = _cursor_to_rendered(cursor)
        else:
            rendered = RenderedSet.of_nodes(_sibling_group(session, head.parent))
    session.cur = rendered
    session.history.append(("rollup", None))
    return rendered


def _breadcrumb(session: ExplorationSession) -> list[Interval]:
    cur = session.cur
    anchor = cur.focus_leaf if cur.kind == "objects" else cur.nodes[0].parent
    if anchor is None:
        anchor = cur.nodes[0]  # the root rendered alone
    chain: list[Interval] = []
    node: Node | None = anchor
    while node is not None:
        chain.append(node.interval)
        node = node.parent
    return list(reversed(chain))


def current_view(session: ExplorationSession) -> dict:
    """Read-only snapshot of the rendered elements with their statistics."""
    cur = session.cur
    if cur.kind == "objects":
        elements = [{"subject": o.subject, "value": o.value} for o in cur.objects]
    else:
        elements = [
            {"id": n.id, "interval": n.interval.to_json(), "stats": n.stats.to_json()}
            for n in cur.nodes
        ]
    return {
        "kind": cur.kind,
        "elements": elements,
        "breadcrumb": [i.to_json() for i in _breadcrumb(session)],
        "counters": session.counters.snapshot(),
    }


def replay(session: ExplorationSession, source, params: TreeParams | None = None) -> ExplorationSession:
    """Re-run a session's history on a fresh session over the same data."""
    fresh: ExplorationSession | None = None
    for op, arg in session.history:
        if op == "start":
            scenario, resource, lower, upper = arg
            start = StartingPoint(scenario, lower=lower, upper=upper, resource=resource)
            fresh = start_session(source, start, params=params or session.tree.params,
                                  incremental=session.incremental)
        elif op == "drill":
            drill_down(fresh, fresh.cur.nodes[arg - 1].id)
        elif op == "rollup":
            roll_up(fresh)
    return fresh
