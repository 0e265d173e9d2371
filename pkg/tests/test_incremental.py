"""Incremental construction: prefetch rules, bounds, safety, minimality,
and equivalence with full construction."""

from __future__ import annotations

import random

import pytest

from hetree.errors import TopOfTreeError
from hetree.explore import StartingPoint, drill_down, roll_up, start_session
from hetree.incremental import IcoState, compute_sibling_intervals, constr_sibling_nodes
from hetree.ingest import DataObject
from hetree.stats import stats_from_values
from hetree.tree import Interval, TreeParams, build_hetree_c, build_hetree_r

from conftest import PERSON, make_dataset, node_key


def bounds(nodes):
    return [(n.interval.lower, n.interval.upper) for n in nodes]


# -- the worked flows over the ten-value example -------------------------------


class TestRangeFlows:
    def test_res_flow_counts(self, ages_dataset):
        session = start_session(ages_dataset, StartingPoint.res(PERSON + "p6"),
                                TreeParams("R", 5, 3), incremental=True)
        assert session.counters.nodes_built == 3  # leaf of interest + siblings
        assert session.cur.kind == "objects"
        assert [o.value for o in session.cur.objects] == [37, 45, 50]
        assert bounds(session.state.materialized()) == [(20, 36), (36, 52), (52, 68)]

        roll_up(session)  # leaves rendered; parent level constructed
        assert session.counters.nodes_built == 5
        assert bounds(session.cur.nodes) == [(20, 36), (36, 52), (52, 68)]

        roll_up(session)  # internal level rendered; top + last leaves constructed
        assert session.counters.nodes_built == 8
        assert bounds(session.cur.nodes) == [(20, 68), (68, 100)]
        built = {node_key(n) for n in session.state.materialized()}
        assert (0, 68.0, 84.0) in built and (0, 84.0, 100.0) in built

        roll_up(session)  # root alone; nothing new
        assert session.counters.nodes_built == 8
        with pytest.raises(TopOfTreeError):
            roll_up(session)

    def test_ran_flow_counts(self, ages_dataset):
        session = start_session(ages_dataset, StartingPoint.ran(30, 50),
                                TreeParams("R", 5, 3), incremental=True)
        assert session.counters.nodes_built == 5  # interest leaves + parent + sibling
        assert bounds(session.cur.nodes) == [(20, 36), (36, 52), (52, 68)]
        roll_up(session)
        assert session.counters.nodes_built == 8
        assert bounds(session.cur.nodes) == [(20, 68), (68, 100)]

    def test_bsc_flow_counts(self, ages_dataset):
        session = start_session(ages_dataset, StartingPoint.bsc(),
                                TreeParams("R", 5, 3), incremental=True)
        assert session.counters.nodes_built == 3  # root + both children
        assert bounds(session.cur.nodes) == [(20, 100)]
        drill_down(session, session.cur.nodes[0].id)
        assert session.counters.nodes_built == 8  # grandchildren prefetched
        assert bounds(session.cur.nodes) == [(20, 68), (68, 100)]
        before = session.counters.nodes_built
        roll_up(session)
        assert session.counters.nodes_built == before  # BSC roll-up builds nothing

    def test_drill_into_materialized_region_builds_nothing(self, ages_dataset):
        session = start_session(ages_dataset, StartingPoint.ran(30, 50),
                                TreeParams("R", 5, 3), incremental=True)
        before = session.counters.nodes_built
        drill_down(session, session.cur.nodes[1].id)  # leaf -> objects
        roll_up(session)
        assert session.counters.nodes_built == before


class TestContentFlows:
    def test_res_slices(self, ages_dataset):
        session = start_session(ages_dataset, StartingPoint.res(PERSON + "p6"),
                                TreeParams("C", 5, 3), incremental=True)
        # slot arithmetic: (45, p6) is S[6], lam=2 -> slot 3; siblings 1..3
        assert session.counters.nodes_built == 3
        assert [[o.value for o in n.data] for n in session.state.materialized()] == [
            [20, 30], [35, 35], [37, 45]]
        assert [o.value for o in session.cur.objects] == [37, 45]

    def test_bsc_init(self, ages_dataset):
        session = start_session(ages_dataset, StartingPoint.bsc(),
                                TreeParams("C", 5, 3), incremental=True)
        assert session.counters.nodes_built <= 3 + 1

    def test_full_descent_equals_full_construction(self, ages_dataset):
        session = start_session(ages_dataset, StartingPoint.bsc(),
                                TreeParams("C", 5, 3), incremental=True)

        def descend():
            for node in list(session.cur.nodes):
                if node.height > 0:
                    drill_down(session, node.id)
                    descend()
                    roll_up(session)

        descend()
        full, _ = build_hetree_c(ages_dataset, 5, 3)
        full_keys = {node_key(n) for level in full.levels for n in level}
        got_keys = {node_key(n) for n in session.state.materialized()}
        assert got_keys == full_keys
        by_key = {node_key(n): n for level in full.levels for n in level}
        for node in session.state.materialized():
            other = by_key[node_key(node)]
            assert [o.value for o in node.data] == [o.value for o in other.data]
            assert node.stats.count == other.stats.count


# -- helper procedures ----------------------------------------------------------


class TestSiblingIntervals:
    def test_running_example_grid(self):
        grid = compute_sibling_intervals(20, 100, 16, 5)
        assert [(i.lower, i.upper, i.upper_closed) for i in grid] == [
            (20, 36, False), (36, 52, False), (52, 68, False),
            (68, 84, False), (84, 100, True)]

    def test_single_interval_reaching_up(self):
        grid = compute_sibling_intervals(0, 10, 10, 3)
        assert [(i.lower, i.upper, i.upper_closed) for i in grid] == [(0, 10, True)]

    def test_truncated_last(self):
        grid = compute_sibling_intervals(0, 7, 2, 4)
        assert [(i.lower, i.upper) for i in grid] == [(0, 2), (2, 4), (4, 6), (6, 7)]
        assert [i.upper_closed for i in grid] == [False, False, False, True]


class TestConstrSiblingNodes:
    def _intervals(self):
        return compute_sibling_intervals(20, 100, 16, 5)

    def test_bins_running_example(self, ages_dataset):
        pool = list(ages_dataset.objects)
        nodes = constr_sibling_nodes(self._intervals(), None, pool, 0)
        assert [[o.value for o in n.data] for n in nodes] == [
            [20, 30, 35, 35], [37, 45, 50], [55], [80], [100]]
        assert pool == []
        assert nodes[1].stats == stats_from_values([37.0, 45.0, 50.0])

    def test_empty_pool(self):
        assert constr_sibling_nodes(self._intervals(), None, [], 0) == []

    def test_partial_interval_set_consumes_matching(self, ages_dataset):
        pool = list(ages_dataset.objects)
        nodes = constr_sibling_nodes([Interval(20, 36, upper_closed=False)], None, pool, 0)
        assert len(nodes) == 1
        assert [o.value for o in nodes[0].data] == [20, 30, 35, 35]
        assert len(pool) == 6

    def test_empty_intervals_skipped(self):
        pool = [DataObject("urn:a", "p", 9.5)]
        nodes = constr_sibling_nodes(compute_sibling_intervals(0, 10, 2, 5), None, pool, 0)
        assert len(nodes) == 1
        assert (nodes[0].interval.lower, nodes[0].interval.upper) == (8, 10)


# -- safety / minimality / equivalence oracles -----------------------------------


def required_union(full_tree, start: StartingPoint, ops, dataset):
    """Independent replay over the full tree: everything rendered plus
    everything reachable by one operation, per the construction rules."""
    required: set = set()

    def nonempty(nodes):
        return [n for n in nodes if not n.stats.is_empty]

    def add(nodes):
        for n in nodes:
            required.add(node_key(n))

    def group_of(node):
        return nonempty(node.parent.children) if node.parent else [node]

    def one_step_targets(rendered):
        kind, payload = rendered
        if kind == "objects":
            return
        nodes = payload
        head = nodes[0]
        if head.parent is not None:
            add([head.parent])
            add(group_of(head.parent))
        if head.height > 0:
            for n in nodes:
                add(nonempty(n.children))

    from hetree.explore import _full_covering_node, _full_leaf_of_resource

    if start.scenario == "RES":
        leaf = _full_leaf_of_resource(full_tree, start.resource)
        add(group_of(leaf))
        rendered = ("objects", leaf)
    elif start.scenario == "RAN":
        lo = max(start.lower, dataset.minv)
        hi = min(start.upper, dataset.maxv)
        covering = _full_covering_node(full_tree, lo, hi)
        interest = nonempty(covering.children)
        add(interest)
        rendered = ("nodes", interest)
        one_step_targets(rendered)
    else:
        add([full_tree.root])
        rendered = ("nodes", [full_tree.root])
        one_step_targets(rendered)

    for op, arg in ops:
        kind, payload = rendered
        if op == "drill":
            node = payload[arg - 1]
            rendered = ("objects", node) if node.is_leaf else ("nodes", nonempty(node.children))
        else:
            if kind == "objects":
                rendered = ("nodes", group_of(payload))
            else:
                parent = payload[0].parent
                if parent is None:
                    continue
                rendered = ("nodes", group_of(parent))
        add(rendered[1] if rendered[0] == "nodes" else [rendered[1]])
        one_step_targets(rendered)
    return required


def run_random_instance(rng, variant):
    n = rng.randrange(15, 220)
    degree = rng.choice([2, 3, 4])
    leaves = rng.randrange(2, min(28, n))
    values = [rng.uniform(0, 1000) for _ in range(n)]
    ds = make_dataset(values)
    scenario = rng.choice(["BSC", "RES", "RAN"])
    if scenario == "RES":
        start = StartingPoint.res(rng.choice(ds.objects).subject)
    elif scenario == "RAN":
        lo = rng.uniform(0, 900)
        start = StartingPoint.ran(lo, rng.uniform(lo, 1000))
    else:
        start = StartingPoint.bsc()
    params = TreeParams(variant, leaves, degree)
    session = start_session(ds, start, params, incremental=True)
    build = build_hetree_c if variant == "C" else build_hetree_r
    full, _ = build(ds, leaves, degree)

    init_bound = {"RES": degree, "RAN": 2 * degree + degree ** 2, "BSC": degree + 1}
    assert session.counters.nodes_built <= init_bound[scenario]

    ops = []
    for _ in range(rng.randrange(2, 10)):
        before = session.counters.nodes_built
        if session.cur.kind == "nodes":
            op = rng.choice(["drill", "roll"])
        else:
            op = "roll"
        try:
            if op == "drill":
                index = rng.randrange(len(session.cur.nodes)) + 1
                drill_down(session, session.cur.nodes[index - 1].id)
                ops.append(("drill", index))
            else:
                roll_up(session)
                ops.append(("roll", None))
        except TopOfTreeError:
            continue
        assert session.counters.nodes_built - before <= degree ** 2

        # safety: every legal next operation's targets already exist
        cur = session.cur
        if cur.kind == "nodes":
            for node in cur.nodes:
                assert node.height == 0 or node.children, "drill target missing"
            head = cur.nodes[0]
            if head.height < session.state.layout.root_height:
                assert head.parent is not None, "roll target missing"

    # minimality: materialized == required union, counters agree
    required = required_union(full, start, ops, ds)
    materialized = {node_key(n) for n in session.state.materialized()}
    assert materialized == required
    assert session.counters.nodes_built == len(required)

    # equivalence: every materialized node matches its full counterpart
    by_key = {node_key(n): n for level in full.levels for n in level}
    for node in session.state.materialized():
        other = by_key[node_key(node)]
        assert [o.subject for o in node.data] == [o.subject for o in other.data]
        assert node.stats.count == other.stats.count
        if node.stats.count:
            assert abs(node.stats.mean - other.stats.mean) <= 1e-9 * max(1, abs(other.stats.mean))
            assert abs(node.stats.variance - other.stats.variance) <= 1e-9 * max(1, other.stats.variance)


class TestRandomized:
    def test_range_variant_scripts(self):
        rng = random.Random(101)
        for _ in range(40):
            run_random_instance(rng, "R")

    def test_content_variant_scripts(self):
        rng = random.Random(202)
        for _ in range(40):
            run_random_instance(rng, "C")
