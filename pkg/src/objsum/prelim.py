"""Preliminary partial summaries that provably hold the l heaviest nodes.

Generation follows the complete breadth-first join but consults the
``max_li``/``mmax_li`` statistics on the schema tree:

* a child relation whose own tuples and all descendants are bounded by the
  current l-th largest weight is skipped outright;
* a child relation whose descendants are bounded (but its own tuples may
  not be) is fetched with a bounded join: only the best ``l`` partners above
  the current l-th largest weight.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping

from .datagraph import DataGraph, TupleId
from .gds import GdsTree
from .osgen import OsTree


@dataclass(frozen=True)
class JoinEvent:
    parent: int
    relation_label: str
    gds_id: int
    mode: str  # "skip", "bounded" or "full"
    largest_l: float
    pq_full: bool
    fetched: int


@dataclass
class PrelimState:
    l: int
    top_l: list = field(default_factory=list)  # min-heap of (weight, -index)
    largest_l: float = 0.0
    extracted: int = 0
    skipped: int = 0
    bounded_joins: int = 0
    full_joins: int = 0
    events: list[JoinEvent] = field(default_factory=list)
    largest_history: list[float] = field(default_factory=list)

    @property
    def full(self) -> bool:
        return len(self.top_l) >= self.l

    def offer(self, weight: float, index: int) -> None:
        """Admit a freshly extracted node to the top-l queue if it qualifies."""
        if self.full and not weight > self.largest_l:
            return
        heapq.heappush(self.top_l, (weight, -index))
        if len(self.top_l) > self.l:
            heapq.heappop(self.top_l)
        self.largest_l = self.top_l[0][0] if self.full else 0.0
        self.largest_history.append(self.largest_l)

    def counters(self) -> dict:
        return {
            "extracted": self.extracted,
            "skipped_relations": self.skipped,
            "bounded_joins": self.bounded_joins,
            "full_joins": self.full_joins,
            "largest_l": self.largest_l,
        }


@dataclass
class PrelimTree:
    tree: OsTree
    state: PrelimState

    @property
    def n(self) -> int:
        return self.tree.n


def generate_prelim(l: int, ds: TupleId, gds: GdsTree, graph: DataGraph, scores: Mapping[TupleId, float],
                    max_depth: int | None = None) -> PrelimTree:
    """Partial summary of ``ds`` containing its l heaviest nodes.

    ``gds`` must carry statistics (:func:`objsum.gds.annotate_stats`) computed
    from the same ``scores``.  ``max_depth`` defaults to ``l - 1``.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    if not gds.annotated:
        raise ValueError("schema tree lacks max/mmax statistics; call annotate_stats first")
    if ds.relation != gds.root.relation:
        raise ValueError(f"{ds} is not a {gds.root.relation} tuple")
    if ds not in graph.tuples:
        raise KeyError(ds)
    if max_depth is None:
        max_depth = l - 1
    view = DataGraph(graph.schema, graph.tuples, graph.by_relation, graph.adjacency, dict(scores))

    state = PrelimState(l)
    parent, weight, tuples, gnodes, via = [-1], [scores[ds]], [ds], [gds.root], [None]
    labels, displays, depth = [gds.root.label], [graph.display(ds)], [0]
    state.extracted = 1
    state.offer(weight[0], 0)
    queue = deque([0])
    while queue:
        i = queue.popleft()
        if depth[i] >= max_depth:
            continue
        for child in gnodes[i].children:
            largest = state.largest_l
            if state.full and largest >= child.max_li and largest >= child.mmax_li:
                state.skipped += 1
                state.events.append(JoinEvent(i, child.label, child.id, "skip", largest, True, 0))
                continue
            if largest >= child.mmax_li:
                # while the queue is not full nothing is excluded by value
                floor = largest if state.full else -math.inf
                limit = None if child.hop.many_to_one else l
                pairs = child.hop.partners_bounded(view, tuples[i], floor, limit, child.affinity,
                                                   exclude_row=via[i])
                mode = "bounded"
                state.bounded_joins += 1
            else:
                pairs = child.hop.partners(view, tuples[i], exclude_row=via[i])
                mode = "full"
                state.full_joins += 1
            state.events.append(JoinEvent(i, child.label, child.id, mode, largest, state.full, len(pairs)))
            for row, p in pairs:
                idx = len(parent)
                parent.append(i)
                weight.append(scores[p] * child.affinity)
                tuples.append(p)
                gnodes.append(child)
                via.append(row)
                labels.append(child.label)
                displays.append(graph.display(p))
                depth.append(depth[i] + 1)
                queue.append(idx)
                state.extracted += 1
                state.offer(weight[idx], idx)
    tree = OsTree(parent, weight, tuples, gnodes, via, labels, displays)
    return PrelimTree(tree, state)


def top_l_weights(tree: OsTree, l: int) -> list[float]:
    return sorted(tree.weight, reverse=True)[:l]


def verify_contains_topl(prelim: PrelimTree | OsTree, full: OsTree, l: int) -> bool:
    """True iff ``prelim`` is part of ``full`` and keeps its l heaviest weights.

    Nodes are matched by root path, so replicated tuples count separately.
    Ties at the l-th weight may be met by any of the tied nodes.
    """
    ptree = prelim.tree if isinstance(prelim, PrelimTree) else prelim
    full_sigs = {full.signature(i) for i in range(full.n)}
    if any(ptree.signature(i) not in full_sigs for i in range(ptree.n)):
        return False
    return top_l_weights(ptree, l) == top_l_weights(full, l)
