"""Adaptive reconstruction: reshape a built tree to a new degree or leaf
count, reusing existing nodes and statistics wherever the case analysis
permits.

Exactly one parameter changes per call. Degree changes keep the leaves;
leaf-count changes keep at most merged leaf contents. The eight cases:

* degree_power   d' = d^k   : drop intermediate levels, reconnect; no new
                              nodes, no statistics work.
* degree_multiple d' = k*d  : rebuild internals; height-1 statistics are
                              derived by merging the old height-1 ones.
* degree_root    d = d'^k   : keep everything, insert k-1 levels between
                              each internal node and its children.
* degree_other              : rebuild internals, recompute their stats.
* leaves_increase ell' > ell: reallocate everything except the sort.
* leaves_div_power ell/d^k  : merge d^k leaves per new leaf; the new leaf
                              inherits the replaced height-k node's stats.
* leaves_div     ell/k      : merge k leaves, derive leaf stats, rebuild
                              internals.
* leaves_minus   ell - k    : reallocate; leaf stats reuse fully-contained
                              old leaves, aggregated with leftover raws.

Counter semantics: a node or statistic is "derived" when it is produced
from elements of the old tree that do not survive into the new one;
fresh work is "scratch"; survivors are not counted at all.

Content-based leaf merges reproduce the from-scratch quota layout only
when the old leaves are uniformly filled (leaf count divides the object
count); otherwise the merge cases fall back to reallocation and the
report marks the reuse as inexact.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace as dc_replace

from .counters import BuildCounters
from .errors import AdaptationError, BothChangedError, NoChangeError, ParameterError
from .ingest import Dataset
from .stats import merge_stats, merge_stats_with_values
from .tree import (
    HETree,
    Interval,
    Node,
    TreeParams,
    _build_leaves_c,
    _build_leaves_r,
    constr_internal_nodes,
    tree_height,
)

DEGREE_POWER = "degree_power"
DEGREE_MULTIPLE = "degree_multiple"
DEGREE_ROOT = "degree_root"
DEGREE_OTHER = "degree_other"
LEAVES_INCREASE = "leaves_increase"
LEAVES_DIV_POWER = "leaves_div_power"
LEAVES_DIV = "leaves_div"
LEAVES_MINUS = "leaves_minus"


@dataclass(frozen=True)
class AdaptationCase:
    kind: str
    k: int | None = None


@dataclass
class AdaptationReport:
    case: AdaptationCase
    leaves_scratch: int = 0
    leaves_derived: int = 0
    internals_scratch: int = 0
    internals_derived: int = 0
    stats_leaves_scratch: int = 0
    stats_leaves_derived: int = 0
    stats_internals_scratch: int = 0
    stats_internals_derived: int = 0
    exact_reuse: bool = True
    metrics: dict = field(default_factory=dict)
    leaf_provenance: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "case": {"kind": self.case.kind, "k": self.case.k},
            "construction": {
                "leaves_scratch": self.leaves_scratch,
                "leaves_derived": self.leaves_derived,
                "internals_scratch": self.internals_scratch,
                "internals_derived": self.internals_derived,
            },
            "statistics": {
                "leaves_scratch": self.stats_leaves_scratch,
                "leaves_derived": self.stats_leaves_derived,
                "internals_scratch": self.stats_internals_scratch,
                "internals_derived": self.stats_internals_derived,
            },
            "exact_reuse": self.exact_reuse,
            "metrics": self.metrics,
        }


def _power_exponent(base: int, value: int) -> int | None:
    """k >= 1 with base**k == value, else None."""
    if value < base or base < 2:
        return None
    k = 0
    acc = 1
    while acc < value:
        acc *= base
        k += 1
    return k if acc == value else None


def classify(degree: int, leaves: int, new_degree: int | None = None,
             new_leaves: int | None = None) -> AdaptationCase:
    """Decide which reconstruction case applies; one knob per call.

    Overlaps resolve in cost order: a power-of-degree match beats a
    multiple, which beats the catch-all.
    """
    degree_changed = new_degree is not None and new_degree != degree
    leaves_changed = new_leaves is not None and new_leaves != leaves
    if degree_changed and leaves_changed:
        raise BothChangedError("change the degree or the leaf count, not both")
    if not degree_changed and not leaves_changed:
        raise NoChangeError("parameters are unchanged")

    if degree_changed:
        if new_degree < 2:
            raise ParameterError("degree must be at least 2")
        if new_degree > degree:
            k = _power_exponent(degree, new_degree)
            if k is not None and k > 1:
                return AdaptationCase(DEGREE_POWER, k)
            if new_degree % degree == 0:
                mult = new_degree // degree
                if mult > 1 and _power_exponent(degree, mult) is None:
                    return AdaptationCase(DEGREE_MULTIPLE, mult)
            return AdaptationCase(DEGREE_OTHER)
        k = _power_exponent(new_degree, degree)
        if k is not None and k > 1:
            return AdaptationCase(DEGREE_ROOT, k)
        return AdaptationCase(DEGREE_OTHER)

    if new_leaves < 1:
        raise ParameterError("leaf count must be positive")
    if new_leaves > leaves:
        return AdaptationCase(LEAVES_INCREASE)
    if leaves % new_leaves == 0:
        ratio = leaves // new_leaves
        k = _power_exponent(degree, ratio)
        if k is not None:
            return AdaptationCase(LEAVES_DIV_POWER, k)
        if ratio > 1:
            return AdaptationCase(LEAVES_DIV, ratio)
    return AdaptationCase(LEAVES_MINUS, leaves - new_leaves)


# -- reusable primitives ----------------------------------------------------


def merge_leaves(leaf_level: list[Node], m: int, ids=None,
                 stats_sources: list[Node] | None = None) -> list[Node]:
    """Merge every m consecutive leaves into one; the last merge takes the
    remainder. Data is concatenated, the interval is the hull, and stats
    come from merging unless a replaced node supplies them directly."""
    if m < 1:
        raise ParameterError("merge width must be positive")
    ids = ids if ids is not None else iter(range(10**9, 10**10))
    merged: list[Node] = []
    for start in range(0, len(leaf_level), m):
        group = leaf_level[start:start + m]
        interval = Interval(group[0].interval.lower, group[-1].interval.upper,
                            upper_closed=group[-1].interval.upper_closed)
        node = Node(next(ids), interval, height=0, slot=len(merged) + 1)
        node.data = [obj for leaf in group for obj in leaf.data]
        if stats_sources is not None:
            node.stats = stats_sources[len(merged)].stats
        else:
            node.stats = merge_stats([leaf.stats for leaf in group])
        merged.append(node)
    return merged


def replace_node(old: Node, new: Node) -> Node:
    """Put ``new`` into ``old``'s child slot; root replacement is the
    caller's bookkeeping since the tree holds that reference."""
    parent = old.parent
    if parent is not None:
        parent.children[parent.children.index(old)] = new
        new.parent = parent
    return new


def create_edges(parents: list[Node], children: list[Node], degree: int) -> None:
    """Connect P[i] to C[(i-1)*d+1 .. (i-1)*d+d], exhausting C."""
    if len(children) > len(parents) * degree:
        raise AdaptationError("too many children for the parent level")
    for node in parents:
        node.children = []
    for i, parent in enumerate(parents):
        chunk = children[i * degree:(i + 1) * degree]
        parent.children = list(chunk)
        for child in chunk:
            child.parent = parent


# -- scope plumbing -----------------------------------------------------------


@dataclass
class _Scope:
    """The adapted region: levels bottom-up, top node last and alone."""

    levels: list[list[Node]]
    dataset: Dataset  # the scope's objects as a sorted dataset
    variant: str
    degree: int

    @property
    def leaves(self) -> list[Node]:
        return self.levels[0]

    @property
    def top(self) -> Node:
        return self.levels[-1][0]


def _collect_scope(tree: HETree, node: Node) -> _Scope:
    if node is tree.root:
        levels = [list(level) for level in tree.levels]
    else:
        levels = [[] for _ in range(node.height + 1)]
        stack = [node]
        while stack:
            item = stack.pop()
            levels[item.height].append(item)
            stack.extend(reversed(item.children))
        for level in levels:
            level.sort(key=lambda n: (n.interval.lower, n.interval.upper))
    objects = [obj for leaf in levels[0] for obj in leaf.data]
    dataset = dc_replace(tree.dataset, objects=objects, sorted=True)
    return _Scope(levels, dataset, tree.params.variant, tree.params.degree)


def _scratch_leaves(scope: _Scope, new_leaves: int, ids, counters: BuildCounters) -> list[Node]:
    params = TreeParams(scope.variant, new_leaves, scope.degree)
    if scope.variant == "C":
        return _build_leaves_c(scope.dataset, params, ids, counters)
    return _build_leaves_r(scope.dataset, params, ids, counters)


def _rebuild_internals(leaves: list[Node], degree: int, ids,
                       report: AdaptationReport) -> list[list[Node]]:
    counters = BuildCounters()
    _, above = constr_internal_nodes(leaves, degree, ids, counters)
    report.internals_scratch += counters.nodes_built
    report.stats_internals_scratch += counters.stats_aggregated
    return [list(leaves)] + above


def _c_merge_is_exact(scope: _Scope, ratio: int) -> bool:
    # Merged lam/lam-1 runs equal the new quota only under uniform fill.
    return len(scope.dataset) % len(scope.leaves) == 0


# -- the eight cases ----------------------------------------------------------


def _case_degree_power(scope: _Scope, k: int, new_degree: int,
                       report: AdaptationReport) -> list[list[Node]]:
    old = scope.levels
    top_height = len(old) - 1
    kept = [old[h] for h in range(0, top_height, k)]
    kept.append(old[top_height])
    for lower, upper in zip(kept, kept[1:]):
        create_edges(upper, lower, new_degree)
    return kept


def _case_degree_root(scope: _Scope, k: int, new_degree: int, ids,
                      report: AdaptationReport) -> list[list[Node]]:
    old = scope.levels
    top = len(old) - 1
    # Interior nodes gain exactly k-1 intermediate levels; the top gains
    # only what the overall new height requires, since the grouping above
    # the last interior level can collapse early.
    new_height = tree_height(len(old[0]), new_degree)
    new_levels: list[list[Node]] = [list(old[0])]
    for height in range(1, len(old)):
        steps = k - 1 if height < top else max(new_height - (top - 1) * k - 1, 0)
        inserted: list[list[Node]] = [[] for _ in range(steps)]
        for node in old[height]:
            current = node.children
            for j in range(steps):
                counters = BuildCounters()
                parents = _level_over(current, new_degree, ids, counters)
                inserted[j].extend(parents)
                report.internals_scratch += len(parents)
                report.stats_internals_scratch += len(parents)
                current = parents
            node.children = list(current)
            for child in current:
                child.parent = node
        new_levels.extend(inserted)
        new_levels.append(list(old[height]))
    return new_levels


def _level_over(children: list[Node], degree: int, ids, counters: BuildCounters) -> list[Node]:
    from .tree import _build_parent_level

    return _build_parent_level(children, degree, ids, counters)


def _case_degree_rebuild(scope: _Scope, new_degree: int, reuse_height1: bool,
                         ids, report: AdaptationReport) -> list[list[Node]]:
    old_h1 = list(scope.levels[1]) if len(scope.levels) > 1 else []
    leaves = scope.leaves
    for leaf in leaves:
        leaf.parent = None
    levels = _rebuild_internals(leaves, new_degree, ids, report)
    if reuse_height1 and old_h1:
        ratio = new_degree // scope.degree
        for i, node in enumerate(levels[1]):
            group = old_h1[i * ratio:(i + 1) * ratio]
            node.stats = merge_stats([g.stats for g in group])
        derived = len(levels[1])
        report.stats_internals_derived += derived
        report.stats_internals_scratch -= derived
    return levels


def _case_leaves_reallocate(scope: _Scope, new_leaves: int, ids,
                            report: AdaptationReport, reuse_contained: bool) -> list[list[Node]]:
    counters = BuildCounters()
    fresh = _scratch_leaves(scope, new_leaves, ids, counters)
    report.leaves_scratch += counters.leaves_built
    if not reuse_contained:
        report.stats_leaves_scratch += counters.stats_from_scratch
    else:
        _reuse_contained_leaf_stats(scope, fresh, report)
    return _rebuild_internals(fresh, scope.degree, ids, report)


def _leaf_index_ranges(leaves: list[Node]) -> list[tuple[int, int]]:
    ranges = []
    start = 0
    for leaf in leaves:
        ranges.append((start, start + len(leaf.data)))
        start += len(leaf.data)
    return ranges


def _reuse_contained_leaf_stats(scope: _Scope, fresh: list[Node],
                                report: AdaptationReport) -> None:
    """Leaf stats for the reallocation case: aggregate the statistics of
    fully contained old leaves with the raw values of partial overlaps.

    Leaf contents are contiguous runs of the sorted scope, for both
    variants, so containment reduces to index-range comparison.
    """
    old_ranges = _leaf_index_ranges(scope.leaves)
    new_ranges = _leaf_index_ranges(fresh)
    values = [obj.value for obj in scope.dataset.objects]
    old_i = 0
    for leaf, (lo, hi) in zip(fresh, new_ranges):
        if lo == hi:
            continue
        reused = []
        reused_ids = []
        covered: list[tuple[int, int]] = []
        while old_i < len(old_ranges) and old_ranges[old_i][1] <= hi:
            s, e = old_ranges[old_i]
            if s >= lo and e > s:
                reused.append(scope.leaves[old_i].stats)
                reused_ids.append(scope.leaves[old_i].id)
                covered.append((s, e))
            old_i += 1
        raw: list[float] = []
        cursor = lo
        for s, e in covered:
            raw.extend(values[cursor:s])
            cursor = e
        raw.extend(values[cursor:hi])
        if reused:
            leaf.stats = merge_stats_with_values(reused, raw)
            report.stats_leaves_derived += 1
        else:
            report.stats_leaves_scratch += 1  # kept the freshly computed stats
        report.leaf_provenance.append(
            {"slot": leaf.slot, "reused_leaves": reused_ids, "raw_values": raw}
        )


def _case_leaves_merge(scope: _Scope, ratio: int, ids, report: AdaptationReport,
                       from_replaced_level: int | None) -> list[list[Node]]:
    old = scope.levels
    if from_replaced_level is not None:
        replaced = old[from_replaced_level]
        fresh = merge_leaves(scope.leaves, ratio, ids, stats_sources=replaced)
        report.leaves_derived += len(fresh)
        if from_replaced_level == len(old) - 1:
            # The replaced level is the scope top: keep it as the root of
            # a two-level result instead of vanishing it.
            top = old[-1][0]
            top.children = list(fresh)
            for leaf in fresh:
                leaf.parent = top
            return [fresh, [top]]
        for old_node, leaf in zip(replaced, fresh):
            replace_node(old_node, leaf)
        return [fresh] + [list(level) for level in old[from_replaced_level + 1:]]
    fresh = merge_leaves(scope.leaves, ratio, ids)
    report.leaves_derived += len(fresh)
    report.stats_leaves_derived += len(fresh)
    return _rebuild_internals(fresh, scope.degree, ids, report)


# -- entry point --------------------------------------------------------------


def _renumber(levels: list[list[Node]]) -> None:
    for height, level in enumerate(levels):
        for slot, node in enumerate(level, start=1):
            node.height = height
            node.slot = slot
    levels[-1][0].parent = None


def adapt(tree: HETree, new_degree: int | None = None, new_leaves: int | None = None,
          root_id: int | None = None) -> tuple[HETree, AdaptationReport]:
    """Reshape the tree (or the subtree under ``root_id``) in place.

    Returns the same tree object and a report whose counters record how
    much was rebuilt versus derived from the previous structure.
    """
    if tree.mode != "full":
        raise AdaptationError("only fully built trees can be adapted")
    scope_top = tree.root if root_id is None else tree.node_by_id(root_id)
    if scope_top is None:
        raise AdaptationError(f"no node with id {root_id}")
    if scope_top.is_leaf:
        raise AdaptationError("the reconstruction root must be an internal node")
    subtree = scope_top is not tree.root

    scope = _collect_scope(tree, scope_top)
    old_leaf_count = len(scope.leaves)
    case = classify(scope.degree, old_leaf_count, new_degree, new_leaves)
    report = AdaptationReport(case)
    effective_degree = new_degree if new_degree is not None else scope.degree
    effective_leaves = new_leaves if new_leaves is not None else old_leaf_count
    report.metrics = _metrics(scope, case, effective_degree, effective_leaves)

    ids = tree._ids

    if case.kind == DEGREE_POWER:
        new_levels = _case_degree_power(scope, case.k, new_degree, report)
    elif case.kind == DEGREE_ROOT:
        new_levels = _case_degree_root(scope, case.k, new_degree, ids, report)
    elif case.kind in (DEGREE_MULTIPLE, DEGREE_OTHER):
        reuse = case.kind == DEGREE_MULTIPLE
        new_levels = _case_degree_rebuild(scope, new_degree, reuse, ids, report)
    elif case.kind == LEAVES_INCREASE:
        new_levels = _case_leaves_reallocate(scope, new_leaves, ids, report,
                                             reuse_contained=False)
    elif case.kind == LEAVES_DIV_POWER:
        ratio = scope.degree ** case.k
        if scope.variant == "R" or _c_merge_is_exact(scope, ratio):
            new_levels = _case_leaves_merge(scope, ratio, ids, report,
                                            from_replaced_level=case.k)
        else:
            report.exact_reuse = False
            new_levels = _case_leaves_reallocate(scope, new_leaves, ids, report,
                                                 reuse_contained=True)
    elif case.kind == LEAVES_DIV:
        if scope.variant == "R" or _c_merge_is_exact(scope, case.k):
            new_levels = _case_leaves_merge(scope, case.k, ids, report,
                                            from_replaced_level=None)
        else:
            report.exact_reuse = False
            new_levels = _case_leaves_reallocate(scope, new_leaves, ids, report,
                                                 reuse_contained=True)
    else:  # LEAVES_MINUS
        new_levels = _case_leaves_reallocate(scope, new_leaves, ids, report,
                                             reuse_contained=True)

    _splice(tree, scope_top, subtree, new_levels, report,
            effective_degree, effective_leaves)
    return tree, report


def _metrics(scope: _Scope, case: AdaptationCase, degree: int, leaves: int) -> dict:
    metrics = {
        "m": len(scope.dataset),
        "e": (degree * leaves - 1) / (degree - 1),
    }
    if case.k is not None and case.kind in (DEGREE_ROOT, LEAVES_DIV_POWER):
        dk = degree ** case.k
        metrics["r"] = (dk * leaves - 1) / (dk - 1)
    return metrics


def _retop(levels: list[list[Node]], retained_top: Node) -> list[list[Node]]:
    """Swap a freshly built top node for the retained boundary node."""
    built_top = levels[-1][0]
    if built_top is retained_top:
        return levels
    retained_top.children = list(built_top.children)
    for child in retained_top.children:
        child.parent = retained_top
    return levels[:-1] + [[retained_top]]


def _splice(tree: HETree, scope_top: Node, subtree: bool,
            new_levels: list[list[Node]], report: AdaptationReport,
            degree: int, leaves: int) -> None:
    if subtree:
        built_top = new_levels[-1][0]
        if built_top is not scope_top:
            # Discard the freshly built top: the reconstruction root stays.
            report.internals_scratch = max(report.internals_scratch - 1, 0)
            report.stats_internals_scratch = max(report.stats_internals_scratch - 1, 0)
            new_levels = _retop(new_levels, scope_top)
        _rebuild_level_index(tree)
    else:
        tree.root = new_levels[-1][0]
        tree.levels = new_levels
        _renumber(new_levels)
        tree.params = TreeParams(tree.params.variant, leaves, degree)


def _rebuild_level_index(tree: HETree) -> None:
    """Recompute heights upward from the leaves and regroup the levels."""

    def settle(node: Node) -> int:
        if not node.children:
            node.height = 0
            return 0
        node.height = max(settle(child) for child in node.children) + 1
        return node.height

    settle(tree.root)
    levels: list[list[Node]] = [[] for _ in range(tree.root.height + 1)]
    stack = [tree.root]
    while stack:
        node = stack.pop()
        levels[node.height].append(node)
        stack.extend(reversed(node.children))
    for level in levels:
        level.sort(key=lambda n: (n.interval.lower, n.interval.upper))
    tree.levels = levels
