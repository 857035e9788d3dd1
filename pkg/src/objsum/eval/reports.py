"""Report serialization: delimited rows, JSON documents and a long-format table."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .bench import BenchReport
from .quality import QualityReport

LONG_COLUMNS = ("instance", "algorithm", "l", "n", "metric", "value")


def write_csv(rows: Sequence[Mapping], path: str | Path, columns: Sequence[str] | None = None) -> Path:
    """Write dict rows; columns default to the union of keys in first-seen order."""
    path = Path(path)
    if columns is None:
        columns = list(dict.fromkeys(k for row in rows for k in row))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.DictWriter(fh, fieldnames=list(columns), extrasaction="ignore")
        out.writeheader()
        for row in rows:
            out.writerow({k: _cell(row.get(k)) for k in columns})
    return path


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, float):
        return repr(value)
    return value


def write_json(doc, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(doc, indent=1, sort_keys=True, default=_jsonable) + "\n", encoding="utf-8")
    return path


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if hasattr(obj, "item"):
        return obj.item()
    return str(obj)


def long_format(report: BenchReport | QualityReport) -> list[dict]:
    """One row per (instance, algorithm, l, n, metric) for plotting."""
    rows = []
    if isinstance(report, QualityReport):
        for c in report.cells:
            algo = f"{c.algorithm}/{c.input}"
            for metric, value in (("ratio", c.ratio), ("importance", c.importance), ("optimal", c.optimal),
                                  ("input_n", c.input_n)):
                rows.append(dict(instance=c.instance, algorithm=algo, l=c.l, n=c.n, metric=metric, value=value))
        return rows
    for c in report.cells:
        algo = c.algorithm if c.input in ("full", "-") else f"{c.algorithm}/{c.input}"
        metrics = {"median_s": c.median_s, "timed_out": int(c.timed_out), "ops": c.ops}
        metrics.update(c.extra)
        for metric, value in metrics.items():
            rows.append(dict(instance=c.instance, algorithm=algo, l=c.l, n=c.n, metric=metric, value=value))
    return rows


def format_table(rows: Sequence[Mapping], columns: Sequence[str], digits: int = 4) -> str:
    """Fixed-width text table for terminal summaries."""
    def fmt(v):
        if v is None:
            return "-"
        if isinstance(v, bool):
            return "yes" if v else "no"
        if isinstance(v, float):
            return f"{v:.{digits}g}"
        return str(v)

    body = [[fmt(row.get(c)) for c in columns] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in body]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(v.ljust(w) for v, w in zip(r, widths)) for r in body]
    return "\n".join(lines)


def write_report(report: BenchReport | QualityReport, out_dir: str | Path, stem: str) -> list[Path]:
    """``<stem>.csv``, ``<stem>.json`` and ``<stem>_long.csv`` under ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = report.rows()
    doc = {"cells": rows}
    if isinstance(report, QualityReport):
        doc["summary"] = report.summary()
    return [write_csv(rows, out_dir / f"{stem}.csv"),
            write_json(doc, out_dir / f"{stem}.json"),
            write_csv(long_format(report), out_dir / f"{stem}_long.csv", LONG_COLUMNS)]


def read_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def concat(reports: Iterable[BenchReport]) -> BenchReport:
    out = BenchReport()
    for r in reports:
        out.cells.extend(r.cells)
    return out
