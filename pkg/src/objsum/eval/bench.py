"""Wall-clock and operation-count benchmarks for summary generation."""

from __future__ import annotations

import gc
import statistics
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from ..datagraph import DataGraph, TupleId
from ..gds import GdsTree, annotate_stats
from ..osgen import OsTree, generate_os
from ..prelim import generate_prelim
from ..summarize import DpTimeout, bottom_up, dp_optimal, top_path
from .synthetic import random_tree

DEFAULT_ALGORITHMS = ("dp", "bottom-up", "top-path")
DEFAULT_DP_TIMEOUT = 10.0


@dataclass(frozen=True)
class BenchCell:
    suite: str
    instance: str
    algorithm: str
    l: int
    n: int
    phase: str  # "osgen" or "sizel"
    input: str  # "full", "prelim" or "-"
    median_s: float | None
    runs: tuple[float, ...]
    timed_out: bool = False
    ops: int = 0
    extra: Mapping[str, float] = field(default_factory=dict)

    def row(self) -> dict:
        doc = {k: v for k, v in self.__dict__.items() if k not in ("runs", "extra")}
        doc["runs"] = len(self.runs)
        doc.update(self.extra)
        return doc


@dataclass
class BenchReport:
    cells: list[BenchCell] = field(default_factory=list)

    def rows(self) -> list[dict]:
        return [c.row() for c in self.cells]

    def find(self, **match) -> list[BenchCell]:
        return [c for c in self.cells if all(getattr(c, k) == v for k, v in match.items())]

    def median(self, algorithm: str, l: int, n: int | None = None, **match) -> float | None:
        """Median time of the single matching cell (``None`` when it timed out)."""
        if n is not None:
            match["n"] = n
        cells = self.find(algorithm=algorithm, l=l, **match)
        if len(cells) != 1:
            raise KeyError(f"{len(cells)} cells match {algorithm=} {l=} {match}")
        return cells[0].median_s


def timed(fn: Callable[[], object], repetitions: int):
    """Run ``fn`` ``repetitions`` times; returns (times, last result, timed_out).

    A :class:`DpTimeout` stops the cell: later repetitions would only repeat
    the timeout.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    times, result = [], None
    gc.collect()
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(repetitions):
            start = time.perf_counter()
            try:
                result = fn()
            except DpTimeout:
                return times, None, True
            times.append(time.perf_counter() - start)
    finally:
        if was_enabled:
            gc.enable()
    return times, result, False


def size_l_runner(name: str, dp_strategy: str = "combination",
                  dp_timeout: float | None = DEFAULT_DP_TIMEOUT) -> Callable[[OsTree, int], object]:
    """Callable for one benchmarked algorithm.

    ``dp`` uses ``dp_strategy`` (the per-node combination search by default);
    ``dp-merge`` is the polynomial child-merging table.
    """
    if name == "dp":
        return lambda tree, l: dp_optimal(tree, l, strategy=dp_strategy, timeout=dp_timeout)
    if name == "dp-merge":
        return lambda tree, l: dp_optimal(tree, l, strategy="merge", timeout=dp_timeout)
    if name == "bottom-up":
        return bottom_up
    if name == "top-path":
        return top_path
    if name == "top-path-fast":
        return lambda tree, l: top_path(tree, l, fast=True)
    raise ValueError(f"unknown algorithm {name!r}")


def _sizel_cell(suite, instance, algo, tree, l, input_label, repetitions, dp_strategy, dp_timeout,
                extra=None) -> BenchCell:
    fn = size_l_runner(algo, dp_strategy, dp_timeout)
    times, res, timed_out = timed(lambda: fn(tree, l), repetitions)
    return BenchCell(suite, instance, algo, l, tree.n, "sizel", input_label,
                     None if timed_out else statistics.median(times), tuple(times), timed_out,
                     0 if res is None else res.ops, dict(extra or {}))


def bench_suite(graph: DataGraph, gds: GdsTree, ds_list: Sequence[TupleId], ls: Iterable[int],
                repetitions: int = 3, scores: Mapping[TupleId, float] | None = None,
                algorithms: Sequence[str] = DEFAULT_ALGORITHMS, dp_strategy: str = "combination",
                dp_timeout: float = DEFAULT_DP_TIMEOUT, use_prelim: bool = True) -> BenchReport:
    """OS generation and size-l timings per DS and l, on full and prelim inputs.

    Generation is timed separately from size-l computation.  Prelim cells
    carry the generation counters and the prelim/full size ratio.
    """
    if repetitions < 3:
        raise ValueError("repetitions must be >= 3")
    scores = dict(graph.importance if scores is None else scores)
    if use_prelim and not gds.annotated:
        gds = annotate_stats(gds, graph, scores)
    report = BenchReport()
    for ds in ds_list:
        name = str(ds)
        for l in ls:
            times, full, _ = timed(lambda: generate_os(ds, gds, graph, scores, max_depth=l - 1), repetitions)
            report.cells.append(BenchCell("db", name, "complete", l, full.n, "osgen", "full",
                                          statistics.median(times), tuple(times), ops=full.n))
            inputs = [("full", full, {})]
            if use_prelim:
                times, pre, _ = timed(lambda: generate_prelim(l, ds, gds, graph, scores), repetitions)
                counters = pre.state.counters()
                counters.update(full_n=full.n, size_ratio=pre.n / full.n)
                report.cells.append(BenchCell("db", name, "prelim", l, pre.n, "osgen", "prelim",
                                              statistics.median(times), tuple(times), ops=pre.state.extracted,
                                              extra=counters))
                inputs.append(("prelim", pre.tree, {"full_n": full.n}))
            for label, tree, extra in inputs:
                for algo in algorithms:
                    report.cells.append(_sizel_cell("db", name, algo, tree, l, label, repetitions,
                                                    dp_strategy, dp_timeout, extra))
    return report


def scaling_suite(ns: Iterable[int], ls: Iterable[int], repetitions: int = 3, seed: int = 7,
                  algorithms: Sequence[str] = DEFAULT_ALGORITHMS, model: str = "skewed",
                  dp_strategy: str = "combination", dp_timeout: float = DEFAULT_DP_TIMEOUT,
                  infer_dp_timeouts: bool = True) -> BenchReport:
    """Size-l timings on one synthetic tree per n.

    With ``infer_dp_timeouts`` a DP cell is not run once DP has timed out on
    a no-larger (n, l); such cells are marked ``inferred`` in their extras.
    """
    rng = np.random.default_rng(seed)
    report = BenchReport()
    ls = sorted(ls)
    dp_failed: dict[str, list[tuple[int, int]]] = {}
    for n in sorted(ns):
        tree = random_tree(n, rng, model)
        for l in ls:
            for algo in algorithms:
                if (algo.startswith("dp") and infer_dp_timeouts
                        and any(n >= fn and l >= fl for fn, fl in dp_failed.get(algo, ()))):
                    report.cells.append(BenchCell("scaling", f"{model}-n{n}", algo, l, n, "sizel", "full",
                                                  None, (), True, 0, {"inferred": 1}))
                    continue
                cell = _sizel_cell("scaling", f"{model}-n{n}", algo, tree, l, "full", repetitions,
                                   dp_strategy, dp_timeout)
                if cell.timed_out:
                    dp_failed.setdefault(algo, []).append((n, l))
                report.cells.append(cell)
    return report


def l_sweep(tree: OsTree, ls: Iterable[int], algorithm: str = "bottom-up", repetitions: int = 5,
            instance: str = "sweep") -> BenchReport:
    """Timings of one algorithm over a grid of l on a fixed tree."""
    report = BenchReport()
    for l in sorted(ls):
        report.cells.append(_sizel_cell("l-sweep", instance, algorithm, tree, l, "full", repetitions,
                                        "combination", None))
    return report
