"""Data-subject schema graph: the schema unfolded into a tree around one relation.

Every node carries an affinity to the root relation (the product of per-hop
decay factors down the tree) and, once annotated, the largest local
importance reachable in its own relation (``max_li``) and below it
(``mmax_li``).  Bridge relations (pure many-to-many link tables) are
collapsed: a hop through a bridge goes straight from one end to the other.
"""

from __future__ import annotations

import copy
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping

from .datagraph import (
    DataGraph,
    Direction,
    LinkDef,
    SchemaDef,
    SchemaError,
    TupleId,
    neighbors,
    neighbors_bounded,
)

DEFAULT_THETA = 0.7
DEFAULT_DEPTH_CAP = 6
DEFAULT_DECAY = 0.9


@dataclass(frozen=True)
class Hop:
    """One step in the unfolded schema.

    A direct hop follows ``link`` in ``direction``.  A bridge hop enters the
    bridge relation through ``link`` (reverse) and leaves through ``out_link``.
    """

    link: LinkDef
    direction: Direction
    out_link: LinkDef | None = None

    @property
    def is_bridge(self) -> bool:
        return self.out_link is not None

    @property
    def source(self) -> str:
        return self.link.to_relation if self.is_bridge or self.direction is Direction.REVERSE \
            else self.link.from_relation

    @property
    def target(self) -> str:
        if self.out_link is not None:
            return self.out_link.to_relation
        if self.direction is Direction.FORWARD:
            return self.link.to_relation
        return self.link.from_relation

    @property
    def key(self) -> str:
        if self.out_link is not None:
            return f"{self.link.from_relation}.{self.link.fk_attr}.{self.out_link.fk_attr}"
        return f"{self.link.name}.{self.direction.value}"

    @property
    def many_to_one(self) -> bool:
        return not self.is_bridge and self.direction is Direction.FORWARD

    def reverse(self) -> "Hop":
        if self.out_link is not None:
            return Hop(self.out_link, Direction.REVERSE, self.link)
        return Hop(self.link, self.direction.flip())

    def partners(self, graph: DataGraph, t: TupleId,
                 exclude_row: TupleId | None = None) -> list[tuple[TupleId | None, TupleId]]:
        """``(bridge row or None, partner)`` pairs, ordered by partner key."""
        if self.out_link is None:
            return [(None, p) for p in neighbors(graph, t, self.link, self.direction)]
        pairs = []
        for row in neighbors(graph, t, self.link, Direction.REVERSE):
            if row == exclude_row:
                continue
            for p in neighbors(graph, row, self.out_link, Direction.FORWARD):
                pairs.append((row, p))
        pairs.sort(key=lambda rp: (rp[1].order(), rp[0].order()))
        return pairs

    def partners_bounded(self, graph: DataGraph, t: TupleId, min_local: float, limit: int | None,
                         affinity: float, exclude_row: TupleId | None = None):
        """Partners whose local importance exceeds ``min_local``, best ``limit`` only."""
        if self.out_link is None:
            found = neighbors_bounded(graph, t, self.link, self.direction, min_local, limit, scale=affinity)
            return [(None, p) for p in found]
        imp = graph.importance
        pairs = [(r, p) for r, p in self.partners(graph, t, exclude_row) if imp[p] * affinity > min_local]
        if limit is not None and len(pairs) > limit:
            ranked = sorted(range(len(pairs)), key=lambda i: (-imp[pairs[i][1]], i))[:limit]
            pairs = [pairs[i] for i in sorted(ranked)]
        return pairs


@dataclass
class AffinityConfig:
    decays: dict[str, float] = field(default_factory=dict)
    default_decay: float = DEFAULT_DECAY
    theta: float = DEFAULT_THETA
    depth_cap: int = DEFAULT_DEPTH_CAP
    overrides: dict[str, float] = field(default_factory=dict)  # node label -> decay factor
    labels: dict[str, str] = field(default_factory=dict)  # hop key -> node label

    def __post_init__(self):
        for key, val in {**self.decays, **self.overrides, "default_decay": self.default_decay}.items():
            if not 0.0 < val <= 1.0:
                raise ValueError(f"decay {key}={val} outside (0, 1]")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta {self.theta} outside [0, 1]")
        if self.depth_cap < 1:
            raise ValueError("depth_cap must be >= 1")

    @classmethod
    def from_dict(cls, doc: Mapping | None) -> "AffinityConfig":
        doc = dict(doc or {})
        return cls(
            decays={str(k): float(v) for k, v in (doc.get("decays") or {}).items()},
            default_decay=float(doc.get("default_decay", DEFAULT_DECAY)),
            theta=float(doc.get("theta", DEFAULT_THETA)),
            depth_cap=int(doc.get("depth_cap", DEFAULT_DEPTH_CAP)),
            overrides={str(k): float(v) for k, v in (doc.get("overrides") or {}).items()},
            labels={str(k): str(v) for k, v in (doc.get("labels") or {}).items()},
        )


@dataclass(eq=False)
class GdsNode:
    id: int
    relation: str
    label: str
    hop: Hop | None
    affinity: float
    depth: int
    parent: "GdsNode | None" = field(default=None, repr=False)
    children: list["GdsNode"] = field(default_factory=list, repr=False)
    max_li: float = 0.0
    mmax_li: float = 0.0

    def walk(self):
        """Pre-order traversal."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


@dataclass
class GdsTree:
    root: GdsNode
    theta: float
    depth_cap: int
    annotated: bool = False

    @property
    def nodes(self) -> list[GdsNode]:
        return sorted(self.root.walk(), key=lambda n: n.id)

    def find(self, label: str) -> list[GdsNode]:
        return [n for n in self.nodes if n.label == label]

    def describe(self) -> str:
        lines = []
        for node in self.root.walk():
            stats = f" max={node.max_li:.4g} mmax={node.mmax_li:.4g}" if self.annotated else ""
            lines.append(f"{'  ' * node.depth}{node.label} [{node.relation}] ({node.affinity:.3f}){stats}")
        return "\n".join(lines)


def candidate_hops(schema: SchemaDef, relation: str) -> list[Hop]:
    hops = []
    is_bridge = schema.relation(relation).bridge
    for lk in schema.links:
        if lk.from_relation == relation and not is_bridge:
            hops.append(Hop(lk, Direction.FORWARD))
        if lk.to_relation == relation:
            if schema.relation(lk.from_relation).bridge:
                hops.extend(Hop(lk, Direction.REVERSE, out) for out in schema.links_from(lk.from_relation)
                            if out != lk)
            else:
                hops.append(Hop(lk, Direction.REVERSE))
    return hops


def compute_affinity(node: GdsNode, cfg: AffinityConfig) -> float:
    if node.parent is None:
        return 1.0
    factor = cfg.overrides.get(node.label)
    if factor is None:
        factor = cfg.decays.get(node.hop.key, cfg.default_decay)
    return factor * node.parent.affinity


def build_gds(schema: SchemaDef, root: str, cfg: AffinityConfig | None = None) -> GdsTree:
    """Unfold ``schema`` breadth-first around ``root``.

    Loops and many-to-many links are replicated as separate nodes.  A node is
    never expanded back along the direct link it was reached by; bridge hops
    may be reversed (co-author style) and the originating bridge row is
    excluded later, when tuples are joined.
    """
    cfg = cfg or AffinityConfig()
    if not schema.has_relation(root):
        raise SchemaError(f"unknown root relation {root!r}")
    if schema.relation(root).bridge:
        raise SchemaError(f"root relation {root!r} is a bridge relation")
    top = GdsNode(0, root, root, None, 1.0, 0)
    queue = deque([top])
    next_id = 1
    while queue:
        node = queue.popleft()
        if node.depth >= cfg.depth_cap:
            continue
        for hop in candidate_hops(schema, node.relation):
            if node.hop is not None and not hop.is_bridge and hop == node.hop.reverse():
                continue
            child = GdsNode(next_id, hop.target, cfg.labels.get(hop.key, hop.target), hop, 0.0,
                            node.depth + 1, parent=node)
            child.affinity = compute_affinity(child, cfg)
            if child.affinity < cfg.theta:
                continue
            node.children.append(child)
            queue.append(child)
            next_id += 1
    return GdsTree(top, cfg.theta, cfg.depth_cap)


def annotate_stats(gds: GdsTree, graph: DataGraph, scores: Mapping[TupleId, float]) -> GdsTree:
    """Copy of ``gds`` with ``max_li`` / ``mmax_li`` filled in from ``scores``."""
    out = copy.deepcopy(gds)
    best_global: dict[str, float] = {}
    for rel, ids in graph.by_relation.items():
        best_global[rel] = max((scores[t] for t in ids), default=0.0)
    nodes = out.nodes
    for node in nodes:
        node.max_li = node.affinity * best_global.get(node.relation, 0.0)
    for node in sorted(nodes, key=lambda n: -n.depth):
        node.mmax_li = max((max(c.max_li, c.mmax_li) for c in node.children), default=0.0)
    out.annotated = True
    return out


def local_importance(t: TupleId, node: GdsNode, scores: Mapping[TupleId, float]) -> float:
    if t.relation != node.relation:
        raise ValueError(f"{t} does not belong to {node.relation}")
    return scores[t] * node.affinity
