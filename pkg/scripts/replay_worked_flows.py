#!/usr/bin/env python3
"""Walk the ten-person example through the three exploration scenarios
with incremental construction, then reshape the tree live.

Prints what the user sees at each step and how many nodes were built,
so the prefetch behavior is visible end to end.
"""

import json
import sys

from hetree.adaptive import adapt
from hetree.explore import StartingPoint, current_view, drill_down, roll_up, start_session
from hetree.ingest import DataObject, Dataset, NUMERIC, sort_dataset
from hetree.tree import TreeParams, build_hetree_c

AGES = {
    "p0": 35, "p1": 100, "p2": 55, "p3": 37, "p4": 30,
    "p5": 35, "p6": 45, "p7": 80, "p8": 20, "p9": 50,
}


def dataset() -> Dataset:
    objects = [DataObject(f"http://persons.com/{s}", "age", float(v))
               for s, v in AGES.items()]
    return sort_dataset(Dataset(objects, NUMERIC, "age"))


def show(session, label):
    built = session.counters.nodes_built
    view = current_view(session)
    if view["kind"] == "objects":
        shown = [e["value"] for e in view["elements"]]
    else:
        shown = [(e["interval"]["lower"], e["interval"]["upper"]) for e in view["elements"]]
    print(f"{label:<28} built so far: {built:>2}  showing: {shown}")


def main() -> int:
    ds = dataset()
    params = TreeParams("R", 5, 3)

    print("# resource-based start at p6 (age 45)")
    s = start_session(ds, StartingPoint.res("http://persons.com/p6"), params,
                      incremental=True)
    show(s, "start")
    roll_up(s); show(s, "roll-up to leaves")
    roll_up(s); show(s, "roll-up to inner level")
    roll_up(s); show(s, "roll-up to root")

    print("\n# range-based start at [30, 50]")
    s = start_session(ds, StartingPoint.ran(30, 50), params, incremental=True)
    show(s, "start")
    drill_down(s, s.cur.nodes[1].id); show(s, "drill into [36, 52)")
    roll_up(s); show(s, "roll-up")
    roll_up(s); show(s, "roll-up")

    print("\n# top-down start, then reshape")
    s = start_session(ds, StartingPoint.bsc(), params, incremental=True)
    show(s, "start (root)")
    drill_down(s, s.cur.nodes[0].id); show(s, "drill")

    tree, _ = build_hetree_c(ds, 5, 3)
    tree, report = adapt(tree, new_degree=2)
    print("\nreshape degree 3 -> 2 on the content tree:")
    print(json.dumps(report.to_json(), indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
