"""Global tuple importance: authority-flow ranking or scores read from a file."""

from __future__ import annotations

import csv
import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np
from scipy import sparse

from .datagraph import DataError, DataGraph, Direction, LinkDef, SchemaDef, TupleId

logger = logging.getLogger(__name__)

ScoreMap = dict[TupleId, float]

DEFAULT_DAMPING = 0.85
DEFAULT_EPSILON = 1e-8
DEFAULT_CEILING = 100.0


def rate_key(link: LinkDef, direction: Direction | str) -> str:
    return f"{link.name}.{Direction(direction).value}"


@dataclass
class AuthorityTransferGraph:
    """Transfer rate per (link, direction); missing entries transfer nothing."""

    rates: dict[str, float] = field(default_factory=dict)
    damping: float = DEFAULT_DAMPING

    def __post_init__(self):
        if not 0.0 < self.damping < 1.0:
            raise ValueError(f"damping must be in (0, 1), got {self.damping}")
        for key, rate in self.rates.items():
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"transfer rate {key}={rate} outside [0, 1]")

    def rate(self, link: LinkDef, direction: Direction | str) -> float:
        return self.rates.get(rate_key(link, direction), 0.0)

    @classmethod
    def uniform(cls, schema: SchemaDef, rate: float = 0.3, damping: float = DEFAULT_DAMPING):
        rates = {rate_key(lk, d): rate for lk in schema.links for d in Direction}
        return cls(rates, damping)

    def check_against(self, schema: SchemaDef) -> None:
        known = {rate_key(lk, d) for lk in schema.links for d in Direction}
        unknown = sorted(set(self.rates) - known)
        if unknown:
            raise ValueError(f"transfer rates for unknown link directions: {unknown}")


def preset(name: str, schema: SchemaDef, rates: Mapping[str, float] | None = None,
           damping: float = DEFAULT_DAMPING) -> AuthorityTransferGraph:
    """``ga1`` uses the configured per-edge rates, ``ga2`` a common rate of 0.3."""
    if name == "ga1":
        ga = AuthorityTransferGraph(dict(rates or {}), damping)
        ga.check_against(schema)
        return ga
    if name == "ga2":
        return AuthorityTransferGraph.uniform(schema, 0.3, damping)
    raise ValueError(f"unknown authority transfer preset {name!r}")


@dataclass
class RankResult:
    scores: ScoreMap
    iterations: int
    converged: bool
    residuals: list[float]


def transfer_matrix(graph: DataGraph, ga: AuthorityTransferGraph, index: Mapping[TupleId, int]):
    """Column-oriented transfer matrix: entry (v, u) is the flow share u -> v."""
    rows, cols, vals = [], [], []
    for (u, link, direction), partners in graph.adjacency.items():
        rate = ga.rate(link, direction)
        if rate <= 0.0 or not partners:
            continue
        share = rate / len(partners)
        j = index[u]
        for v in partners:
            rows.append(index[v])
            cols.append(j)
            vals.append(share)
    n = len(index)
    return sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))


def object_rank(graph: DataGraph, ga: AuthorityTransferGraph, epsilon: float = DEFAULT_EPSILON,
                max_iters: int = 1000, ceiling: float = DEFAULT_CEILING) -> RankResult:
    """Damped authority-flow power iteration, rescaled so the top score is ``ceiling``.

    Each outgoing edge type of a tuple splits its own rate evenly over that
    type's join partners.  Iteration stops when the largest per-tuple change
    drops below ``epsilon``.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    order = sorted(graph.tuples, key=TupleId.order)
    index = {t: i for i, t in enumerate(order)}
    n = len(order)
    if n == 0:
        return RankResult({}, 0, True, [])
    d = ga.damping
    m = transfer_matrix(graph, ga, index) * d
    base = np.full(n, (1.0 - d) / n)
    x = np.full(n, 1.0 / n)
    residuals = []
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        nxt = base + m @ x
        res = float(np.max(np.abs(nxt - x)))
        residuals.append(res)
        x = nxt
        if res < epsilon:
            converged = True
            break
    if not converged:
        warnings.warn(f"object_rank did not converge in {max_iters} iterations "
                      f"(residual {residuals[-1]:.3g})", RuntimeWarning, stacklevel=2)
    top = float(x.max())
    if top > 0:
        x = x * (ceiling / top)
    return RankResult({t: float(x[i]) for t, i in index.items()}, it, converged, residuals)


def zero_scores(graph: DataGraph) -> ScoreMap:
    return {t: 0.0 for t in graph.tuples}


def load_scores(path: str | Path, graph: DataGraph) -> ScoreMap:
    """Read ``relation,key,score`` rows; tuples not listed score 0."""
    scores = zero_scores(graph)
    seen: dict[TupleId, int] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return scores
        missing = {"relation", "key", "score"} - set(reader.fieldnames)
        if missing:
            raise DataError(f"{path}: score file header lacks {sorted(missing)}")
        for rowno, row in enumerate(reader, start=2):
            tid = TupleId(row["relation"].strip(), row["key"].strip())
            if tid not in graph.tuples:
                raise DataError(f"{path} row {rowno}: unknown tuple {tid}")
            try:
                value = float(row["score"])
            except ValueError:
                raise DataError(f"{path} row {rowno}: bad score {row['score']!r}") from None
            if not value >= 0.0:
                raise DataError(f"{path} row {rowno}: negative score {value}")
            if tid in seen:
                warnings.warn(f"{path} row {rowno}: duplicate {tid} (row {seen[tid]}), keeping the later one",
                              stacklevel=2)
            seen[tid] = rowno
            scores[tid] = value
    return scores


def write_scores(scores: Mapping[TupleId, float], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(["relation", "key", "score"])
        for tid in sorted(scores, key=TupleId.order):
            out.writerow([tid.relation, tid.key, repr(scores[tid])])
