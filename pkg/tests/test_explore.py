"""Session semantics over a fully built tree."""

from __future__ import annotations

import random

import pytest

from hetree.errors import (
    EmptyRangeError,
    ExplorationError,
    StaleOperationError,
    TopOfTreeError,
    UnknownResourceError,
)
from hetree.explore import (
    StartingPoint,
    current_view,
    drill_down,
    replay,
    roll_up,
    start_session,
)
from hetree.tree import TreeParams, build_hetree_c, build_hetree_r

from conftest import PERSON, make_dataset


@pytest.fixture
def range_tree(ages_dataset):
    tree, _ = build_hetree_r(ages_dataset, 5, 3)
    return tree


@pytest.fixture
def content_tree(ages_dataset):
    tree, _ = build_hetree_c(ages_dataset, 5, 3)
    return tree


def intervals(nodes):
    return [(n.interval.lower, n.interval.upper) for n in nodes]


class TestStart:
    def test_res_renders_leaf_objects(self, range_tree):
        session = start_session(range_tree, StartingPoint.res(PERSON + "p6"))
        assert session.cur.kind == "objects"
        assert [o.value for o in session.cur.objects] == [37, 45, 50]

    def test_ran_renders_covering_children(self, range_tree):
        session = start_session(range_tree, StartingPoint.ran(30, 50))
        assert session.cur.kind == "nodes"
        assert intervals(session.cur.nodes) == [(20, 36), (36, 52), (52, 68)]

    def test_bsc_renders_root_children(self, range_tree):
        session = start_session(range_tree, StartingPoint.bsc())
        assert intervals(session.cur.nodes) == [(20, 68), (68, 100)]

    def test_unknown_resource(self, range_tree):
        with pytest.raises(UnknownResourceError):
            start_session(range_tree, StartingPoint.res("urn:who"))

    def test_disjoint_range(self, range_tree):
        with pytest.raises(EmptyRangeError):
            start_session(range_tree, StartingPoint.ran(500, 900))

    def test_ran_clamped_to_data(self, range_tree):
        session = start_session(range_tree, StartingPoint.ran(-100, 25))
        assert session.cur.kind == "nodes"


class TestDrill:
    def test_drill_internal(self, range_tree):
        session = start_session(range_tree, StartingPoint.bsc())
        left = session.cur.nodes[0]
        rendered = drill_down(session, left.id)
        assert intervals(rendered.nodes) == [(20, 36), (36, 52), (52, 68)]

    def test_drill_leaf_renders_sorted_objects(self, range_tree):
        session = start_session(range_tree, StartingPoint.ran(30, 50))
        leaf = session.cur.nodes[0]
        rendered = drill_down(session, leaf.id)
        assert rendered.kind == "objects"
        assert [o.value for o in rendered.objects] == sorted(o.value for o in leaf.data)

    def test_drill_on_objects_errors(self, range_tree):
        session = start_session(range_tree, StartingPoint.res(PERSON + "p6"))
        with pytest.raises(ExplorationError):
            drill_down(session, 0)

    def test_drill_unrendered_node_is_stale(self, range_tree):
        session = start_session(range_tree, StartingPoint.bsc())
        with pytest.raises(StaleOperationError):
            drill_down(session, 10_000)


class TestRoll:
    def test_from_objects_to_leaf_siblings(self, range_tree):
        session = start_session(range_tree, StartingPoint.res(PERSON + "p6"))
        rendered = roll_up(session)
        assert intervals(rendered.nodes) == [(20, 36), (36, 52), (52, 68)]

    def test_from_leaves_to_internal_level(self, range_tree):
        session = start_session(range_tree, StartingPoint.res(PERSON + "p6"))
        roll_up(session)
        rendered = roll_up(session)
        assert intervals(rendered.nodes) == [(20, 68), (68, 100)]

    def test_root_rendered_alone_then_error(self, range_tree):
        session = start_session(range_tree, StartingPoint.bsc())
        rendered = roll_up(session)
        assert intervals(rendered.nodes) == [(20, 100)]
        with pytest.raises(TopOfTreeError):
            roll_up(session)

    def test_drill_then_roll_restores_rendering(self, content_tree):
        session = start_session(content_tree, StartingPoint.bsc())
        before = [n.id for n in session.cur.nodes]
        drill_down(session, before[0])
        after = roll_up(session)
        assert [n.id for n in after.nodes] == before

    def test_random_drill_roll_inverse(self):
        rng = random.Random(9)
        ds = make_dataset([rng.uniform(0, 100) for _ in range(60)])
        tree, _ = build_hetree_c(ds, 12, 3)
        session = start_session(tree, StartingPoint.bsc())
        for _ in range(20):
            if session.cur.kind != "nodes":
                roll_up(session)
                continue
            before = [n.id for n in session.cur.nodes]
            target = rng.choice(session.cur.nodes)
            drill_down(session, target.id)
            restored = roll_up(session)
            assert [n.id for n in restored.nodes] == before

    def test_maximal_sibling_group(self, range_tree):
        session = start_session(range_tree, StartingPoint.ran(30, 50))
        parent = session.cur.nodes[0].parent
        assert [n.id for n in session.cur.nodes] == [n.id for n in parent.children]


class TestView:
    def test_bsc_group_summaries(self, content_tree):
        session = start_session(content_tree, StartingPoint.bsc())
        view = current_view(session)
        counts = [e["stats"]["count"] for e in view["elements"]]
        means = [round(e["stats"]["mean"], 2) for e in view["elements"]]
        assert counts == [6, 4]
        assert means[1] == 71.25

    def test_breadcrumb_length_one_at_start(self, content_tree):
        session = start_session(content_tree, StartingPoint.bsc())
        view = current_view(session)
        assert len(view["breadcrumb"]) == 1

    def test_view_unchanged_by_drill_roll_round_trip(self, content_tree):
        session = start_session(content_tree, StartingPoint.bsc())
        before = current_view(session)
        drill_down(session, session.cur.nodes[0].id)
        roll_up(session)
        assert current_view(session) == before

    def test_history_replay_reproduces_views(self, ages_dataset):
        params = TreeParams("R", 5, 3)
        session = start_session(ages_dataset, StartingPoint.ran(30, 50), params)
        drill_down(session, session.cur.nodes[1].id)
        roll_up(session)
        roll_up(session)
        view = current_view(session)
        again = replay(session, ages_dataset, params)
        assert current_view(again) == view
