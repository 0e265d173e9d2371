"""Shared fixtures: the ten-person running example and helpers."""

from __future__ import annotations

import pytest

from hetree.ingest import DataObject, Dataset, NUMERIC, sort_dataset

XSD_INT = "http://www.w3.org/2001/XMLSchema#integer"

# subject -> age, the ten-triple running example
AGES = {
    "p0": 35, "p1": 100, "p2": 55, "p3": 37, "p4": 30,
    "p5": 35, "p6": 45, "p7": 80, "p8": 20, "p9": 50,
}
PERSON = "http://persons.com/"
AGE_IRI = "http://example.org/age"


def ages_ntriples() -> str:
    return "".join(
        f'<{PERSON}{s}> <{AGE_IRI}> "{v}"^^<{XSD_INT}> .\n' for s, v in AGES.items()
    )


def ages_csv() -> str:
    rows = "\n".join(f"{PERSON}{s},{v}" for s, v in AGES.items())
    return f"subject,{AGE_IRI}\n{rows}\n"


def make_dataset(values, prefix: str = "urn:item:") -> Dataset:
    objects = [DataObject(f"{prefix}{i:05d}", "urn:prop:v", float(v))
               for i, v in enumerate(values)]
    return sort_dataset(Dataset(objects, NUMERIC, "urn:prop:v"))


@pytest.fixture
def ages_dataset() -> Dataset:
    objects = [DataObject(PERSON + s, AGE_IRI, float(v)) for s, v in AGES.items()]
    return sort_dataset(Dataset(objects, NUMERIC, AGE_IRI))


# Sixteen values for the reshaping examples: a perfect 8-leaf binary tree
# whose pairs are {20,22},{24,26},{28,30},{32,35},...; 35 sits mid-leaf so
# a 5-leaf reallocation splits its leaf.
RESHAPE_VALUES = [20, 22, 24, 26, 28, 30, 32, 35, 38, 40, 42, 44, 46, 48, 50, 52]


@pytest.fixture
def reshape_dataset() -> Dataset:
    return make_dataset(RESHAPE_VALUES, prefix="urn:age:")


def leaf_values(tree) -> list[list[float]]:
    return [[o.value for o in leaf.data] for leaf in tree.levels[0]]


def node_key(node):
    return (node.height, round(node.interval.lower, 9), round(node.interval.upper, 9))


def assert_trees_equal(actual, expected, rel=1e-9):
    """Structural and statistical equality, ignoring node ids."""
    assert len(actual.levels) == len(expected.levels), "different heights"
    for h, (la, le) in enumerate(zip(actual.levels, expected.levels)):
        assert len(la) == len(le), f"level {h} width {len(la)} != {len(le)}"
        for na, ne in zip(la, le):
            assert [o.value for o in na.data] == [o.value for o in ne.data]
            assert [o.subject for o in na.data] == [o.subject for o in ne.data]
            assert abs(na.interval.lower - ne.interval.lower) <= rel * max(1.0, abs(ne.interval.lower))
            assert abs(na.interval.upper - ne.interval.upper) <= rel * max(1.0, abs(ne.interval.upper))
            assert len(na.children) == len(ne.children)
            assert na.stats.count == ne.stats.count
            if na.stats.count:
                for field in ("mean", "variance", "vmin", "vmax"):
                    va, ve = getattr(na.stats, field), getattr(ne.stats, field)
                    assert abs(va - ve) <= rel * max(1.0, abs(ve)), (h, field, va, ve)
