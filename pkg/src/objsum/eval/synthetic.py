"""Seeded synthetic inputs: random OS trees and a scalable bibliographic database."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..datagraph import DataGraph, Direction, SchemaDef, TupleId, parse_schema
from ..osgen import OsTree

WEIGHT_MODELS = ("skewed", "uniform", "integer", "monotone")


def random_shape(n: int, rng: np.random.Generator, branching: float = 3.0,
                 max_children: int | None = None) -> list[int]:
    """Parent array of an n-node tree in breadth-first order.

    Child counts are Poisson(``branching``); a node is forced to have a
    child when the frontier would otherwise run dry before n nodes exist.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    parent = [-1]
    frontier = 0
    while len(parent) < n:
        k = int(rng.poisson(branching))
        if max_children is not None:
            k = min(k, max_children)
        if frontier == len(parent) - 1:
            k = max(k, 1)  # last open node must keep the tree growing
        k = min(k, n - len(parent))
        parent.extend([frontier] * k)
        frontier += 1
    return parent


def tree_weights(parent: list[int], rng: np.random.Generator, model: str = "skewed",
                 alpha: float = 1.5, decay: tuple[float, float] = (0.75, 1.0)) -> list[float]:
    """Node weights for a parent array under one of :data:`WEIGHT_MODELS`.

    ``skewed`` multiplies a Pareto(``alpha``) global score by an affinity
    that shrinks by a U(``decay``) factor per level, so weights tend to fall
    with depth without being monotone.  ``monotone`` scales each child's
    weight down from its parent's.
    """
    n = len(parent)
    if model == "uniform":
        return [float(x) for x in rng.uniform(0.0, 100.0, n)]
    if model == "integer":
        return [float(x) for x in rng.integers(0, 101, n)]
    if model == "skewed":
        glob = rng.pareto(alpha, n) + 1.0
        lo, hi = decay
        step = rng.uniform(lo, hi, n)
        aff = [1.0] * n
        for i in range(1, n):
            aff[i] = aff[parent[i]] * step[i]
        return [float(glob[i] * aff[i]) for i in range(n)]
    if model == "monotone":
        w = [100.0] * n
        shrink = rng.uniform(0.0, 1.0, n)
        for i in range(1, n):
            w[i] = w[parent[i]] * float(shrink[i])
        return w
    raise ValueError(f"unknown weight model {model!r}; expected one of {WEIGHT_MODELS}")


def random_tree(n: int, rng: np.random.Generator, model: str = "skewed", branching: float = 3.0,
                max_children: int | None = None) -> OsTree:
    parent = random_shape(n, rng, branching, max_children)
    return OsTree(parent, tree_weights(parent, rng, model))


def monotone_tree(n: int, rng: np.random.Generator, branching: float = 3.0) -> OsTree:
    return random_tree(n, rng, "monotone", branching)


# --------------------------------------------------------------------------
# synthetic bibliography

BIBLIO_SCHEMA = {
    "relations": [
        {"name": "Author", "key": "id", "attributes": ["id", "name"], "display": ["name"], "text": ["name"]},
        {"name": "Paper", "key": "id", "attributes": ["id", "title", "year_id"], "display": ["title"],
         "text": ["title"]},
        {"name": "Writes", "key": "id", "attributes": ["id", "author_id", "paper_id"], "bridge": True},
        {"name": "Cites", "key": "id", "attributes": ["id", "citing_id", "cited_id"], "bridge": True},
        {"name": "Year", "key": "id", "attributes": ["id", "year", "conference_id"], "display": ["year"],
         "text": ["year"]},
        {"name": "Conference", "key": "id", "attributes": ["id", "name"], "display": ["name"],
         "text": ["name"]},
    ],
    "links": [
        {"from": "Writes", "to": "Author", "fk": "author_id"},
        {"from": "Writes", "to": "Paper", "fk": "paper_id"},
        {"from": "Cites", "to": "Paper", "fk": "citing_id"},
        {"from": "Cites", "to": "Paper", "fk": "cited_id"},
        {"from": "Paper", "to": "Year", "fk": "year_id"},
        {"from": "Year", "to": "Conference", "fk": "conference_id"},
    ],
}

BIBLIO_AFFINITY = {
    "theta": 0.7,
    "default_decay": 0.5,
    "decays": {
        "Writes.author_id.paper_id": 0.92,
        "Writes.paper_id.author_id": 0.8,
        "Cites.citing_id.cited_id": 0.8,
        "Cites.cited_id.citing_id": 0.8,
        "Paper.year_id.forward": 0.9,
        "Year.conference_id.forward": 0.9,
    },
    "labels": {
        "Writes.paper_id.author_id": "Co-Author",
        "Cites.citing_id.cited_id": "PaperCites",
        "Cites.cited_id.citing_id": "PaperCitedBy",
    },
}


@dataclass
class SyntheticDb:
    schema: SchemaDef
    graph: DataGraph
    scores: dict[TupleId, float]

    def top_authors(self, k: int) -> list[TupleId]:
        """The k authors with the most papers (largest summaries), ties by key."""
        writes = self.schema.links_to("Author")[0]
        count = {a: len(self.graph.adjacency.get((a, writes, Direction.REVERSE), ()))
                 for a in self.graph.by_relation["Author"]}
        return sorted(count, key=lambda a: (-count[a], a.order()))[:k]


def bibliography(rng: np.random.Generator, n_authors: int = 200, n_papers: int = 1000,
                 authors_per_paper: float = 2.5, cites_per_paper: float = 3.0, n_conferences: int = 10,
                 n_years: int = 15, alpha: float = 1.2) -> SyntheticDb:
    """Random bibliographic database with Zipf-like productivity and citations.

    Global scores are Pareto(``alpha``) draws (bridge rows score 0), which
    gives the skewed importance distribution the prelim pruning relies on.
    """
    schema = parse_schema(BIBLIO_SCHEMA)
    conferences = [{"id": str(i), "name": f"Conf{i}"} for i in range(1, n_conferences + 1)]
    years = []
    for c in range(1, n_conferences + 1):
        for y in range(n_years):
            years.append({"id": str(len(years) + 1), "year": str(1990 + y), "conference_id": str(c)})
    authors = [{"id": str(i), "name": f"Author{i}"} for i in range(1, n_authors + 1)]
    productivity = 1.0 / np.arange(1, n_authors + 1) ** 0.8
    productivity /= productivity.sum()
    papers, writes = [], []
    year_pick = rng.integers(1, len(years) + 1, n_papers)
    for p in range(1, n_papers + 1):
        papers.append({"id": str(p), "title": f"Paper{p}", "year_id": str(year_pick[p - 1])})
        k = min(n_authors, 1 + int(rng.poisson(authors_per_paper - 1)))
        for a in rng.choice(n_authors, size=k, replace=False, p=productivity):
            writes.append({"id": str(len(writes) + 1), "author_id": str(a + 1), "paper_id": str(p)})
    cites, seen = [], set()
    cited: list[int] = []  # one entry per citation received: preferential attachment
    for p in range(n_papers):
        for _ in range(int(rng.poisson(cites_per_paper))):
            if cited and rng.random() < 0.5:
                q = cited[int(rng.integers(len(cited)))]
            else:
                q = int(rng.integers(n_papers))
            if q == p or (p, q) in seen:
                continue
            seen.add((p, q))
            cited.append(q)
            cites.append({"id": str(len(cites) + 1), "citing_id": str(p + 1), "cited_id": str(q + 1)})
    rows = {"Author": authors, "Paper": papers, "Writes": writes, "Cites": cites, "Year": years,
            "Conference": conferences}
    graph = DataGraph.build(schema, rows)
    draws = rng.pareto(alpha, graph.num_tuples)
    scores = {}
    for t, x in zip(sorted(graph.tuples, key=TupleId.order), draws):
        scores[t] = 0.0 if schema.relation(t.relation).bridge else float(x)
    return SyntheticDb(schema, graph.with_importance(scores), scores)
