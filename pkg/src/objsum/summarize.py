"""Size-l summaries: pick l connected nodes, root included, of maximum total weight.

Four algorithms share the :class:`SizeLResult` output:

* :func:`dp_optimal` - exact dynamic program over per-node optimal tables.
* :func:`bottom_up` - repeatedly prune the lightest leaf.
* :func:`top_path` - repeatedly take the root path with the best average weight.
* :func:`brute_force` - enumerate every candidate (tiny inputs only).

Ties are broken deterministically.  The exact algorithms return the
lexicographically smallest index set among the optimal ones.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass

from .osgen import OsTree

BRUTE_FORCE_MAX_N = 25
BRUTE_FORCE_MAX_L = 10
_REL_TIE = 1e-12


class DpTimeout(RuntimeError):
    """The dynamic program ran past its deadline."""


class GuardError(ValueError):
    """Input too large for exhaustive enumeration."""


@dataclass(frozen=True)
class SizeLResult:
    selected: tuple[int, ...]
    importance: float
    algorithm: str
    elapsed: float
    l: int
    truncated: bool = False
    ops: int = 0

    def __len__(self) -> int:
        return len(self.selected)

    def to_dict(self, tree: OsTree | None = None) -> dict:
        doc = {
            "algorithm": self.algorithm,
            "l": self.l,
            "selected": list(self.selected),
            "importance": self.importance,
            "elapsed": self.elapsed,
            "truncated": self.truncated,
            "ops": self.ops,
        }
        if tree is not None:
            doc["tuples"] = [str(tree.tuples[i]) if tree.tuples[i] is not None else None
                             for i in self.selected]
        return doc


def _check_l(l: int) -> None:
    if l < 1:
        raise ValueError(f"l must be >= 1, got {l}")


def _whole(tree: OsTree, l: int, name: str, start: float) -> SizeLResult:
    sel = tuple(range(tree.n))
    return SizeLResult(sel, tree.importance_of(sel), name, time.perf_counter() - start, l,
                       truncated=l > tree.n)


def _result(tree: OsTree, sel, name: str, start: float, l: int, ops: int = 0) -> SizeLResult:
    sel = tuple(sorted(sel))
    return SizeLResult(sel, tree.importance_of(sel), name, time.perf_counter() - start, l, ops=ops)


def _prefer(tree: OsTree, w_new: float, sel_new, w_old: float, sel_old) -> bool:
    """True if candidate ``sel_new`` beats ``sel_old``.

    Weights within rounding noise are re-summed exactly; true ties go to
    the lexicographically smaller sorted index tuple.
    """
    if abs(w_new - w_old) > _REL_TIE * max(abs(w_new), abs(w_old)):
        return w_new > w_old
    a, b = tuple(sel_new()) if callable(sel_new) else sel_new, sel_old
    wa, wb = tree.importance_of(a), tree.importance_of(b)
    if wa != wb:
        return wa > wb
    return a < b


# --------------------------------------------------------------------------
# dynamic program


def _merge_tables(tree: OsTree, l: int, deadline: float | None, keep_all: bool):
    """Exact tables by folding children in one at a time (tree knapsack)."""
    w, depth, children = tree.weight, tree.depth, tree.children
    tables: list[list | None] = [None] * tree.n
    kept = {}
    ops = 0
    for v in range(tree.n - 1, -1, -1):
        if depth[v] > l - 1:
            continue
        if deadline is not None and time.perf_counter() > deadline:
            raise DpTimeout(f"dp exceeded its deadline at node {v}")
        cap = l - depth[v]
        tab = [(w[v], (v,))]  # tab[k] holds the best set of k+1 nodes
        for c in children[v]:
            ct = tables[c]
            if ct is None:
                continue
            merged = list(tab)
            for i, (wa, sa) in enumerate(tab):
                for j, (wb, sb) in enumerate(ct):
                    k = i + j + 1
                    if k >= cap:
                        break
                    ops += 1
                    cand = wa + wb
                    if k == len(merged):
                        merged.append((cand, tuple(sorted(sa + sb))))
                    elif _prefer(tree, cand, lambda: sorted(sa + sb), *merged[k]):
                        merged[k] = (cand, tuple(sorted(sa + sb)))
            tab = merged
            if not keep_all:
                tables[c] = None
        tables[v] = tab
        if keep_all:
            kept[v] = {i + 1: entry for i, entry in enumerate(tab)}
    if keep_all:
        return kept, ops
    return {0: {i + 1: entry for i, entry in enumerate(tables[0])}}, ops


def _combination_tables(tree: OsTree, l: int, deadline: float | None, keep_all: bool):
    """Exact tables by trying every split of i-1 nodes over the children.

    This per-node combination search grows exponentially with l; it is the
    reference form of the dynamic program.  The root only gets its size-l
    entry.
    """
    w, depth, children = tree.weight, tree.depth, tree.children
    tables: dict[int, list[tuple[float, tuple[int, ...]]]] = {}
    ops = 0
    by_depth: dict[int, list[int]] = {}
    for v in range(tree.n):
        if depth[v] <= l - 1:
            by_depth.setdefault(depth[v], []).append(v)
    for k in sorted(by_depth, reverse=True):
        for v in by_depth[k]:
            kids = [c for c in children[v] if c in tables]
            sizes = [l] if v == 0 else range(1, l - depth[v] + 1)
            tab = {}
            for i in sizes:
                best_w, best_sel = None, None
                for combo in _splits(kids, tables, i - 1):
                    ops += 1
                    if deadline is not None and ops % 1024 == 0 and time.perf_counter() > deadline:
                        raise DpTimeout("dp exceeded its deadline")
                    cand_w = w[v] + sum(tables[c][j - 1][0] for c, j in combo)
                    cand_sel = lambda combo=combo: sorted(
                        (v,) + tuple(itertools.chain.from_iterable(tables[c][j - 1][1] for c, j in combo)))
                    if best_w is None or _prefer(tree, cand_w, cand_sel, best_w, best_sel):
                        best_w, best_sel = cand_w, tuple(cand_sel())
                if best_w is None:
                    break  # fewer than i nodes below v
                tab[i] = (best_w, best_sel)
            tables[v] = [tab[i] for i in sorted(tab)] if v else tab
    if keep_all:
        return {v: (t if v == 0 else {i + 1: e for i, e in enumerate(t)}) for v, t in tables.items()}, ops
    return {0: tables.get(0, {})}, ops


def _splits(kids: list[int], tables, budget: int, start: int = 0):
    """Every assignment of ``budget`` nodes to ``kids`` (0 or a table size each)."""
    if budget == 0:
        yield ()
        return
    if start >= len(kids):
        return
    c = kids[start]
    yield from _splits(kids, tables, budget, start + 1)
    for j in range(1, min(budget, len(tables[c])) + 1):
        for rest in _splits(kids, tables, budget - j, start + 1):
            yield ((c, j),) + rest


_STRATEGIES = {"merge": _merge_tables, "combination": _combination_tables}


def dp_tables(tree: OsTree, l: int, strategy: str = "combination") -> dict[int, list]:
    """Per-node optimal tables: ``tables[v][i] == (W(S_{v,i}), S_{v,i})``.

    With the combination strategy the root only holds its size-l entry.
    """
    _check_l(l)
    return _STRATEGIES[strategy](tree, l, None, True)[0]


def dp_optimal(tree: OsTree, l: int, strategy: str = "merge", timeout: float | None = None) -> SizeLResult:
    """Optimal size-l summary.

    ``strategy="merge"`` folds each child's table into its parent's in
    O(n * l^2); ``"combination"`` enumerates child splits per node and grows
    exponentially with l.  Both are exact.  ``timeout`` (seconds) raises
    :class:`DpTimeout` when exceeded.
    """
    _check_l(l)
    start = time.perf_counter()
    name = "dp" if strategy == "merge" else f"dp-{strategy}"
    if l >= tree.n:
        return _whole(tree, l, name, start)
    deadline = start + timeout if timeout is not None else None
    tables, ops = _STRATEGIES[strategy](tree, l, deadline, False)
    sel = tables[0][l][1]
    return _result(tree, sel, name, start, l, ops)


# --------------------------------------------------------------------------
# greedy heuristics


def bottom_up(tree: OsTree, l: int) -> SizeLResult:
    """Prune the lightest leaf until l nodes remain.

    Equal weights prune the deeper node first, then the later index.
    ``ops`` counts priority-queue pushes and pops.
    """
    _check_l(l)
    start = time.perf_counter()
    n = tree.n
    if l >= n:
        return _whole(tree, l, "bottom-up", start)
    w, depth, parent = tree.weight, tree.depth, tree.parent
    live_children = [len(c) for c in tree.children]
    heap = [(w[i], -depth[i], -i) for i in range(n) if not live_children[i]]
    heapq.heapify(heap)
    ops = len(heap)
    pruned = bytearray(n)
    remaining = n
    while remaining > l:
        _, _, neg = heapq.heappop(heap)
        i = -neg
        ops += 1
        pruned[i] = 1
        remaining -= 1
        p = parent[i]
        live_children[p] -= 1
        if not live_children[p]:
            heapq.heappush(heap, (w[p], -depth[p], -p))
            ops += 1
    return _result(tree, (i for i in range(n) if not pruned[i]), "bottom-up", start, l, ops)


def _path_up(parent, active, v: int) -> list[int]:
    path = [v]
    while parent[v] >= 0 and active[parent[v]]:
        v = parent[v]
        path.append(v)
    path.reverse()
    return path


def top_path(tree: OsTree, l: int, fast: bool = False) -> SizeLResult:
    """Repeatedly add the root path with the highest average weight.

    Averages are taken over each node's path from the root of its current
    tree in the forest left by earlier selections.  When fewer slots remain
    than the path has nodes, only its top nodes are added.  Equal averages
    prefer the shallower node, then the smaller index.  ``fast`` keeps one
    precomputed champion per forest tree instead of rescanning every node;
    it selects exactly the same nodes.
    """
    _check_l(l)
    start = time.perf_counter()
    if l >= tree.n:
        return _whole(tree, l, "top-path", start)
    if fast:
        sel, ops = _top_path_champions(tree, l)
    else:
        sel, ops = _top_path_scan(tree, l)
    return _result(tree, sel, "top-path-fast" if fast else "top-path", start, l, ops)


def _top_path_scan(tree: OsTree, l: int):
    n, w, depth, parent, children = tree.n, tree.weight, tree.depth, tree.parent, tree.children
    active = bytearray(b"\x01") * n
    psum = [0.0] * n
    plen = [0] * n
    for i in range(n):
        p = parent[i]
        psum[i] = w[i] + (psum[p] if p >= 0 else 0.0)
        plen[i] = 1 + (plen[p] if p >= 0 else 0)
    ops = n
    selected: list[int] = []
    while len(selected) < l:
        best, best_key = -1, None
        for i in range(n):
            if active[i]:
                key = (psum[i] / plen[i], -depth[i], -i)
                if best_key is None or key > best_key:
                    best, best_key = i, key
        path = _path_up(parent, active, best)
        take = path[: l - len(selected)]
        selected.extend(take)
        for v in take:
            active[v] = 0
        if len(selected) >= l:
            break
        for v in path:
            for c in children[v]:
                if not active[c]:
                    continue
                stack = [c]
                while stack:
                    u = stack.pop()
                    p = parent[u]
                    base = active[p] if p >= 0 else 0
                    psum[u] = w[u] + (psum[p] if base else 0.0)
                    plen[u] = 1 + (plen[p] if base else 0)
                    ops += 1
                    stack.extend(children[u])
    return selected, ops


def _champion(tree: OsTree, root: int):
    """Best (average, -depth, -index) key in ``root``'s subtree, paths starting at ``root``."""
    w, depth, children = tree.weight, tree.depth, tree.children
    best_key, best = None, -1
    stack = [(root, 0.0, 0)]
    visited = 0
    while stack:
        u, s, k = stack.pop()
        s += w[u]
        k += 1
        visited += 1
        key = (s / k, -depth[u], -u)
        if best_key is None or key > best_key:
            best_key, best = key, u
        stack.extend((c, s, k) for c in children[u])
    return best_key, best, visited


def _top_path_champions(tree: OsTree, l: int):
    parent, children = tree.parent, tree.children
    active = bytearray(b"\x01") * tree.n
    heap = []
    key, champ, ops = _champion(tree, 0)
    heap.append(((-key[0], -key[1], -key[2]), champ))
    selected: list[int] = []
    while len(selected) < l:
        _, best = heapq.heappop(heap)
        path = _path_up(parent, active, best)
        take = path[: l - len(selected)]
        selected.extend(take)
        for v in take:
            active[v] = 0
        if len(selected) >= l:
            break
        for v in path:
            for c in children[v]:
                if active[c]:
                    key, champ, visited = _champion(tree, c)
                    ops += visited
                    heapq.heappush(heap, ((-key[0], -key[1], -key[2]), champ))
    return selected, ops


# --------------------------------------------------------------------------
# exhaustive oracle


def brute_force(tree: OsTree, l: int, force: bool = False) -> SizeLResult:
    """Best of all root-containing connected node sets of size min(l, n)."""
    _check_l(l)
    if not force and (tree.n > BRUTE_FORCE_MAX_N or l > BRUTE_FORCE_MAX_L):
        raise GuardError(f"brute force refused for n={tree.n}, l={l} "
                         f"(limits n<={BRUTE_FORCE_MAX_N}, l<={BRUTE_FORCE_MAX_L}; pass force=True)")
    start = time.perf_counter()
    if l >= tree.n:
        return _whole(tree, l, "brute-force", start)
    parent = tree.parent
    best_w, best_sel = -math.inf, None
    count = 0
    for rest in itertools.combinations(range(1, tree.n), l - 1):
        chosen = set(rest)
        chosen.add(0)
        if any(parent[i] not in chosen for i in rest):
            continue
        count += 1
        sel = (0,) + rest
        weight = tree.importance_of(sel)
        if weight > best_w:  # combinations arrive in lexicographic order
            best_w, best_sel = weight, sel
    return _result(tree, best_sel, "brute-force", start, l, count)


ALGORITHMS = {
    "dp": dp_optimal,
    "bottom-up": bottom_up,
    "top-path": top_path,
}


def run(name: str, tree: OsTree, l: int, **kwargs) -> SizeLResult:
    if name == "top-path-fast":
        return top_path(tree, l, fast=True)
    if name == "dp-combination":
        return dp_optimal(tree, l, strategy="combination", **kwargs)
    if name not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {name!r}")
    return ALGORITHMS[name](tree, l, **kwargs)
