"""In-memory data graph over a relational dataset.

Tuples are indexed by ``TupleId`` and joined through the foreign-key links
declared in a schema file.  The graph is built once and treated as
read-only afterwards; importance scores are attached with
:meth:`DataGraph.with_importance`, which shares the adjacency index.
"""

from __future__ import annotations

import csv
import enum
import heapq
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple

import yaml

logger = logging.getLogger(__name__)


class SchemaError(ValueError):
    """Malformed or inconsistent schema file."""


class DataError(ValueError):
    """Tuple files that do not agree with the schema."""


class Direction(str, enum.Enum):
    # forward: from the FK-holding tuple to the referenced tuple
    FORWARD = "forward"
    REVERSE = "reverse"

    def flip(self) -> "Direction":
        return Direction.REVERSE if self is Direction.FORWARD else Direction.FORWARD


@dataclass(frozen=True)
class RelationDef:
    name: str
    key_attr: str
    attributes: tuple[str, ...]
    display_attrs: tuple[str, ...] = ()
    text_attrs: tuple[str, ...] = ()
    bridge: bool = False


@dataclass(frozen=True)
class LinkDef:
    from_relation: str
    to_relation: str
    fk_attr: str

    @property
    def name(self) -> str:
        return f"{self.from_relation}.{self.fk_attr}"


@dataclass(frozen=True)
class SchemaDef:
    relations: tuple[RelationDef, ...]
    links: tuple[LinkDef, ...]

    def relation(self, name: str) -> RelationDef:
        for rel in self.relations:
            if rel.name == name:
                return rel
        raise SchemaError(f"unknown relation {name!r}")

    def has_relation(self, name: str) -> bool:
        return any(rel.name == name for rel in self.relations)

    def links_from(self, name: str) -> list[LinkDef]:
        return [lk for lk in self.links if lk.from_relation == name]

    def links_to(self, name: str) -> list[LinkDef]:
        return [lk for lk in self.links if lk.to_relation == name]

    def validate(self) -> None:
        if not self.relations:
            raise SchemaError("schema declares no relations")
        seen: set[str] = set()
        for rel in self.relations:
            if rel.name in seen:
                raise SchemaError(f"duplicate relation {rel.name!r}")
            seen.add(rel.name)
            if rel.key_attr not in rel.attributes:
                raise SchemaError(f"{rel.name}: key {rel.key_attr!r} is not a declared attribute")
            for attr in (*rel.display_attrs, *rel.text_attrs):
                if attr not in rel.attributes:
                    raise SchemaError(f"{rel.name}: attribute {attr!r} is not declared")
        for lk in self.links:
            for end in (lk.from_relation, lk.to_relation):
                if end not in seen:
                    raise SchemaError(f"link {lk.name} references unknown relation {end!r}")
            if lk.fk_attr not in self.relation(lk.from_relation).attributes:
                raise SchemaError(f"link {lk.name}: {lk.fk_attr!r} is not an attribute of {lk.from_relation}")
        if len(set(self.links)) != len(self.links):
            raise SchemaError("duplicate link")
        for rel in self.relations:
            if rel.bridge and len(self.links_from(rel.name)) < 2:
                raise SchemaError(f"bridge relation {rel.name} needs at least two outgoing links")


def _as_tuple(value, where: str) -> tuple[str, ...]:
    if value is None:
        return ()
    if isinstance(value, str) or not isinstance(value, (list, tuple)):
        raise SchemaError(f"{where}: expected a list")
    return tuple(str(v) for v in value)


def parse_schema(doc: Mapping) -> SchemaDef:
    if not isinstance(doc, Mapping):
        raise SchemaError("schema document must be a mapping")
    relations = []
    for i, raw in enumerate(doc.get("relations") or []):
        try:
            relations.append(RelationDef(
                name=str(raw["name"]),
                key_attr=str(raw["key"]),
                attributes=_as_tuple(raw["attributes"], f"relations[{i}].attributes"),
                display_attrs=_as_tuple(raw.get("display"), f"relations[{i}].display"),
                text_attrs=_as_tuple(raw.get("text"), f"relations[{i}].text"),
                bridge=bool(raw.get("bridge", False)),
            ))
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"relations[{i}]: missing field {exc}") from None
    links = []
    for i, raw in enumerate(doc.get("links") or []):
        try:
            links.append(LinkDef(str(raw["from"]), str(raw["to"]), str(raw["fk"])))
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"links[{i}]: missing field {exc}") from None
    schema = SchemaDef(tuple(relations), tuple(links))
    schema.validate()
    return schema


def schema_to_doc(schema: SchemaDef) -> dict:
    rels = []
    for rel in schema.relations:
        entry = {
            "name": rel.name,
            "key": rel.key_attr,
            "attributes": list(rel.attributes),
            "display": list(rel.display_attrs),
            "text": list(rel.text_attrs),
        }
        if rel.bridge:
            entry["bridge"] = True
        rels.append(entry)
    links = [{"from": lk.from_relation, "to": lk.to_relation, "fk": lk.fk_attr} for lk in schema.links]
    return {"relations": rels, "links": links}


def load_schema(path: str | Path) -> SchemaDef:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise SchemaError(f"{path}: cannot parse schema: {exc}") from None
    return parse_schema(doc)


def dump_schema(schema: SchemaDef, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(schema_to_doc(schema), fh, sort_keys=False)


def key_order(key: str) -> tuple:
    """Sort keys numerically when they are integers, else lexically."""
    if key.isdigit():
        return (0, int(key), key)
    return (1, 0, key)


class TupleId(NamedTuple):
    relation: str
    key: str

    def __str__(self) -> str:
        return f"{self.relation}:{self.key}"

    def order(self) -> tuple:
        return (self.relation, key_order(self.key))


@dataclass(frozen=True)
class TupleRecord:
    display: str
    text: str  # lower-cased searchable text


@dataclass
class DataGraph:
    schema: SchemaDef
    tuples: dict[TupleId, TupleRecord]
    by_relation: dict[str, list[TupleId]]
    adjacency: dict[tuple[TupleId, LinkDef, Direction], list[TupleId]]
    importance: dict[TupleId, float] = field(default_factory=dict)

    @classmethod
    def build(cls, schema: SchemaDef, rows: Mapping[str, Iterable[Mapping[str, str]]]) -> "DataGraph":
        """Index ``rows`` (relation name -> dict rows) against ``schema``.

        Row numbers in error messages count from 2, matching the line in a
        CSV file whose first line is the header.
        """
        tuples: dict[TupleId, TupleRecord] = {}
        by_relation: dict[str, list[TupleId]] = {}
        raw: dict[TupleId, tuple[int, Mapping[str, str]]] = {}
        for rel in schema.relations:
            ids = []
            for rowno, row in enumerate(rows.get(rel.name, ()), start=2):
                key = (row.get(rel.key_attr) or "").strip()
                if not key:
                    raise DataError(f"{rel.name} row {rowno}: empty key {rel.key_attr!r}")
                tid = TupleId(rel.name, key)
                if tid in tuples:
                    raise DataError(f"{rel.name} row {rowno}: duplicate key {key!r}")
                display = ", ".join(row.get(a, "") or "" for a in rel.display_attrs)
                text = " ".join(row.get(a, "") or "" for a in rel.text_attrs).lower()
                tuples[tid] = TupleRecord(display, text)
                raw[tid] = (rowno, row)
                ids.append(tid)
            ids.sort(key=TupleId.order)
            by_relation[rel.name] = ids

        adjacency: dict[tuple[TupleId, LinkDef, Direction], list[TupleId]] = {}
        for lk in schema.links:
            for tid in by_relation[lk.from_relation]:
                rowno, row = raw[tid]
                ref = (row.get(lk.fk_attr) or "").strip()
                if not ref:
                    continue  # NULL foreign key
                target = TupleId(lk.to_relation, ref)
                if target not in tuples:
                    raise DataError(
                        f"{lk.from_relation} row {rowno}: {lk.fk_attr}={ref!r} "
                        f"references no {lk.to_relation} key"
                    )
                adjacency.setdefault((tid, lk, Direction.FORWARD), []).append(target)
                adjacency.setdefault((target, lk, Direction.REVERSE), []).append(tid)
        for partners in adjacency.values():
            partners.sort(key=TupleId.order)
        graph = cls(schema, tuples, by_relation, adjacency)
        graph.importance = {tid: 0.0 for tid in tuples}
        return graph

    def with_importance(self, scores: Mapping[TupleId, float]) -> "DataGraph":
        missing = [t for t in self.tuples if t not in scores]
        if missing:
            raise ValueError(f"scores missing for {len(missing)} tuples, e.g. {missing[0]}")
        return DataGraph(self.schema, self.tuples, self.by_relation, self.adjacency,
                         {t: float(scores[t]) for t in self.tuples})

    @property
    def num_tuples(self) -> int:
        return len(self.tuples)

    @property
    def num_edges(self) -> int:
        return sum(len(v) for (_, _, d), v in self.adjacency.items() if d is Direction.FORWARD)

    def display(self, t: TupleId) -> str:
        return self.tuples[t].display


def load_tuples(schema: SchemaDef, directory: str | Path) -> DataGraph:
    """Read ``<directory>/<Relation>.csv`` for every relation in ``schema``."""
    directory = Path(directory)
    rows: dict[str, list[dict[str, str]]] = {}
    for rel in schema.relations:
        path = directory / f"{rel.name}.csv"
        if not path.exists():
            raise DataError(f"missing tuple file {path}")
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            absent = [a for a in rel.attributes if a not in header]
            if absent:
                raise DataError(f"{path}: header lacks attributes {absent}")
            rows[rel.name] = list(reader)
    graph = DataGraph.build(schema, rows)
    logger.info("loaded %d tuples, %d edges from %s", graph.num_tuples, graph.num_edges, directory)
    return graph


def find_ds(graph: DataGraph, relation: str, keywords: Iterable[str]) -> list[TupleId]:
    """Tuples of ``relation`` whose searchable text contains every keyword."""
    graph.schema.relation(relation)
    terms = [k.lower() for k in keywords if k.strip()]
    return [t for t in graph.by_relation[relation]
            if all(term in graph.tuples[t].text for term in terms)]


def neighbors(graph: DataGraph, t: TupleId, link: LinkDef, direction: Direction) -> list[TupleId]:
    if t not in graph.tuples:
        raise KeyError(t)
    return list(graph.adjacency.get((t, link, Direction(direction)), ()))


def neighbors_bounded(graph: DataGraph, t: TupleId, link: LinkDef, direction: Direction,
                      min_importance: float, limit: int | None, scale: float = 1.0) -> list[TupleId]:
    """Highest-importance join partners with ``importance * scale > min_importance``.

    ``limit=None`` keeps every qualifying partner.  The result is ordered by
    ascending key, like :func:`neighbors`.
    """
    if limit is not None and limit < 1:
        raise ValueError("limit must be >= 1")
    imp = graph.importance
    qualifying = [p for p in neighbors(graph, t, link, direction) if imp[p] * scale > min_importance]
    if limit is not None and len(qualifying) > limit:
        keep = set(heapq.nsmallest(limit, qualifying, key=lambda p: (-imp[p], p.order())))
        qualifying = [p for p in qualifying if p in keep]
    return qualifying
