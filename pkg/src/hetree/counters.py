"""Construction instrumentation.

Counts node constructions and how each node's statistics were obtained,
so that the incremental and adaptive claims (per-step bounds, reuse) are
checkable in tests and visible in view documents.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class BuildCounters:
    nodes_built: int = 0
    leaves_built: int = 0
    stats_from_scratch: int = 0
    stats_aggregated: int = 0
    objects_scanned: int = 0

    def node(self, leaf: bool) -> None:
        self.nodes_built += 1
        if leaf:
            self.leaves_built += 1

    def snapshot(self) -> dict:
        return {
            "nodes_built": self.nodes_built,
            "leaves_built": self.leaves_built,
            "stats_from_scratch": self.stats_from_scratch,
            "stats_aggregated": self.stats_aggregated,
            "objects_scanned": self.objects_scanned,
        }
