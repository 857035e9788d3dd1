"""Object summary trees and their breadth-first generation."""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .datagraph import DataGraph, TupleId
from .gds import GdsNode, GdsTree


@dataclass(frozen=True)
class OsNode:
    index: int
    tuple: TupleId | None
    gds_node: GdsNode | None
    weight: float
    depth: int
    parent: int
    children: tuple[int, ...]
    label: str
    display: str


class OsTree:
    """Rooted tree stored as parallel arrays in topological order.

    Node 0 is the root and every parent index is smaller than its child's,
    so a reverse index scan visits children before parents.  Trees built by
    :func:`generate_os` are additionally in breadth-first order.
    """

    def __init__(self, parent: Sequence[int], weight: Sequence[float],
                 tuples: Sequence[TupleId | None] | None = None,
                 gds: Sequence[GdsNode | None] | None = None,
                 via: Sequence[TupleId | None] | None = None,
                 labels: Sequence[str] | None = None,
                 displays: Sequence[str] | None = None):
        n = len(parent)
        if n == 0:
            raise ValueError("an OS tree has at least its root")
        if len(weight) != n:
            raise ValueError("parent and weight lengths differ")
        if parent[0] != -1:
            raise ValueError("node 0 must be the root (parent -1)")
        self.parent = list(parent)
        self.weight = [float(w) for w in weight]
        self.children: list[list[int]] = [[] for _ in range(n)]
        self.depth = [0] * n
        for i in range(1, n):
            p = self.parent[i]
            if not 0 <= p < i:
                raise ValueError(f"node {i}: parent {p} must precede it")
            self.children[p].append(i)
            self.depth[i] = self.depth[p] + 1
        for i, w in enumerate(self.weight):
            if not w >= 0.0:
                raise ValueError(f"node {i}: negative or NaN weight {w}")
        self.tuples = list(tuples) if tuples is not None else [None] * n
        self.gds = list(gds) if gds is not None else [None] * n
        self.via = list(via) if via is not None else [None] * n
        self.labels = list(labels) if labels is not None else ["node"] * n
        self.displays = list(displays) if displays is not None else [str(i) for i in range(n)]

    @property
    def n(self) -> int:
        return len(self.parent)

    def __len__(self) -> int:
        return len(self.parent)

    def __repr__(self) -> str:
        return f"OsTree(n={self.n}, depth={max(self.depth)})"

    def node(self, i: int) -> OsNode:
        return OsNode(i, self.tuples[i], self.gds[i], self.weight[i], self.depth[i],
                      self.parent[i], tuple(self.children[i]), self.labels[i], self.displays[i])

    def nodes(self) -> list[OsNode]:
        return [self.node(i) for i in range(self.n)]

    def importance_of(self, indices: Iterable[int]) -> float:
        return math.fsum(self.weight[i] for i in indices)

    def signature(self, i: int) -> tuple:
        """Identity of node ``i`` independent of its index: its root path."""
        path = []
        while i >= 0:
            g = self.gds[i]
            path.append((g.id if g is not None else None, self.tuples[i], self.via[i]))
            i = self.parent[i]
        return tuple(reversed(path))

    def is_rooted_subtree(self, selected: Iterable[int]) -> bool:
        sel = set(selected)
        if 0 not in sel:
            return False
        return all(0 <= i < self.n and (i == 0 or self.parent[i] in sel) for i in sel)

    def restrict(self, selected: Iterable[int]) -> "OsTree":
        """The subtree induced by a connected, root-containing ``selected`` set."""
        keep = sorted(set(selected))
        if not self.is_rooted_subtree(keep):
            raise ValueError("selection is not a connected subtree containing the root")
        pos = {old: new for new, old in enumerate(keep)}
        return OsTree([pos[self.parent[i]] if i else -1 for i in keep],
                      [self.weight[i] for i in keep],
                      [self.tuples[i] for i in keep], [self.gds[i] for i in keep],
                      [self.via[i] for i in keep], [self.labels[i] for i in keep],
                      [self.displays[i] for i in keep])

    def same_as(self, other: "OsTree") -> bool:
        return (self.parent == other.parent and self.weight == other.weight
                and self.tuples == other.tuples and self.labels == other.labels
                and self.displays == other.displays)


def generate_os(ds: TupleId, gds: GdsTree, graph: DataGraph, scores: Mapping[TupleId, float],
                max_depth: int | None = None) -> OsTree:
    """Complete object summary of ``ds`` by breadth-first joins along ``gds``.

    Nodes at depth ``max_depth`` are kept but not expanded.  For size-l work
    pass ``max_depth=l - 1``: deeper tuples cannot be connected to the root
    within l nodes.
    """
    if ds.relation != gds.root.relation:
        raise ValueError(f"{ds} is not a {gds.root.relation} tuple")
    if ds not in graph.tuples:
        raise KeyError(ds)
    if max_depth is not None and max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    parent, weight, tuples, gnodes, via, labels, displays = [-1], [scores[ds]], [ds], [gds.root], [None], \
        [gds.root.label], [graph.display(ds)]
    depth = [0]
    queue = deque([0])
    while queue:
        i = queue.popleft()
        if max_depth is not None and depth[i] >= max_depth:
            continue
        for child in gnodes[i].children:
            for row, p in child.hop.partners(graph, tuples[i], exclude_row=via[i]):
                parent.append(i)
                weight.append(scores[p] * child.affinity)
                tuples.append(p)
                gnodes.append(child)
                via.append(row)
                labels.append(child.label)
                displays.append(graph.display(p))
                depth.append(depth[i] + 1)
                queue.append(len(parent) - 1)
    return OsTree(parent, weight, tuples, gnodes, via, labels, displays)


def total_importance(nodes: Iterable[OsNode]) -> float:
    return math.fsum(node.weight for node in nodes)


def _structured(tree: OsTree, i: int, keep: set[int] | None) -> dict:
    t = tree.tuples[i]
    return {
        "relation": t.relation if t is not None else None,
        "key": t.key if t is not None else None,
        "label": tree.labels[i],
        "display": tree.displays[i],
        "weight": tree.weight[i],
        "depth": tree.depth[i],
        "children": [_structured(tree, c, keep) for c in tree.children[i] if keep is None or c in keep],
    }


def _keep(tree: OsTree, selected: Iterable[int] | None) -> set[int] | None:
    if selected is None:
        return None
    keep = set(selected)
    if not tree.is_rooted_subtree(keep):
        raise ValueError("selection is not a connected subtree containing the root")
    return keep


def to_structured(tree: OsTree, selected: Iterable[int] | None = None) -> dict:
    """Nested records (relation, key, label, display, weight, depth, children)."""
    return _structured(tree, 0, _keep(tree, selected))


def render(tree: OsTree, fmt: str = "text", selected: Iterable[int] | None = None,
           weight_digits: int = 2) -> str:
    """Nested rendering of ``tree`` (or of its ``selected`` subtree)."""
    keep = _keep(tree, selected)
    if fmt == "structured":
        return json.dumps(_structured(tree, 0, keep), indent=1, ensure_ascii=False)
    if fmt != "text":
        raise ValueError(f"unknown render format {fmt!r}")
    lines = []
    stack = [0]
    while stack:
        i = stack.pop()
        lines.append(f"{'  ' * tree.depth[i]}{tree.labels[i]}: {tree.displays[i]} "
                     f"({tree.weight[i]:.{weight_digits}f})")
        stack.extend(c for c in reversed(tree.children[i]) if keep is None or c in keep)
    return "\n".join(lines)


def parse_structured(doc: str | Mapping) -> OsTree:
    """Inverse of ``render(tree, "structured")`` (schema-graph references are not kept)."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    parent, weight, tuples, labels, displays = [], [], [], [], []
    queue = deque([(doc, -1)])
    while queue:
        rec, p = queue.popleft()
        idx = len(parent)
        parent.append(p)
        weight.append(float(rec["weight"]))
        rel, key = rec.get("relation"), rec.get("key")
        tuples.append(TupleId(rel, key) if rel is not None else None)
        labels.append(rec["label"])
        displays.append(rec["display"])
        queue.extend((child, idx) for child in rec.get("children", ()))
    return OsTree(parent, weight, tuples, None, None, labels, displays)
