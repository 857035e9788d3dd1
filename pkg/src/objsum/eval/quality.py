"""Approximation quality of the size-l algorithms against the exact optimum."""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

from ..osgen import OsTree
from ..summarize import SizeLResult, dp_optimal, run

DEFAULT_ALGORITHMS = ("dp", "bottom-up", "top-path")


@dataclass
class Instance:
    """One OS to evaluate.  ``prelim(l)`` builds its prelim-l tree, if available."""

    name: str
    tree: OsTree
    prelim: Callable[[int], OsTree] | None = None


@dataclass(frozen=True)
class QualityCell:
    instance: str
    algorithm: str
    l: int
    input: str  # "full" or "prelim"
    importance: float
    optimal: float
    ratio: float
    n: int
    input_n: int


@dataclass
class QualityReport:
    cells: list[QualityCell] = field(default_factory=list)

    def summary(self) -> list[dict]:
        """Mean ratio, instance count and mean |OS| per (algorithm, l, input)."""
        groups: dict[tuple, list[QualityCell]] = {}
        for c in self.cells:
            groups.setdefault((c.algorithm, c.l, c.input), []).append(c)
        out = []
        for (algo, l, inp), cells in sorted(groups.items(), key=lambda kv: (kv[0][1], kv[0][0], kv[0][2])):
            out.append({
                "algorithm": algo, "l": l, "input": inp,
                "mean_ratio": statistics.fmean(c.ratio for c in cells),
                "min_ratio": min(c.ratio for c in cells),
                "instances": len(cells),
                "mean_os_size": statistics.fmean(c.n for c in cells),
                "mean_input_size": statistics.fmean(c.input_n for c in cells),
            })
        return out

    def rows(self) -> list[dict]:
        return [c.__dict__.copy() for c in self.cells]


def ratio(achieved: float, optimal: float) -> float:
    if optimal <= 0.0:
        return 1.0  # all-zero summaries: every choice is optimal
    return achieved / optimal


def quality_suite(instances: Sequence[Instance | OsTree], ls: Iterable[int],
                  algorithms: Sequence[str] = DEFAULT_ALGORITHMS) -> QualityReport:
    """Ratio of each algorithm's importance to the exact optimum on the full OS.

    Every algorithm runs on the full tree and, when the instance can build
    one, on its prelim-l tree.
    """
    report = QualityReport()
    ls = list(ls)
    for k, inst in enumerate(instances):
        if isinstance(inst, OsTree):
            inst = Instance(f"tree{k}", inst)
        for l in ls:
            opt = dp_optimal(inst.tree, l).importance
            inputs = [("full", inst.tree)]
            if inst.prelim is not None:
                inputs.append(("prelim", inst.prelim(l)))
            for label, tree in inputs:
                for algo in algorithms:
                    res = run(algo, tree, l)
                    report.cells.append(QualityCell(inst.name, algo, l, label, res.importance, opt,
                                                    ratio(res.importance, opt), inst.tree.n, tree.n))
    return report


@dataclass(frozen=True)
class OverlapScore:
    shared: int
    l: int

    @property
    def value(self) -> float:
        return self.shared / self.l

    def __float__(self) -> float:
        return self.value


def overlap(a: SizeLResult | Iterable[Hashable], b: SizeLResult | Iterable[Hashable]) -> OverlapScore:
    """Fraction of a size-l summary shared with another of the same size.

    Results compare by node index; plain collections compare by their items
    (e.g. tuple ids, to score against a hand-written reference summary).
    """
    sa = set(a.selected) if isinstance(a, SizeLResult) else set(a)
    sb = set(b.selected) if isinstance(b, SizeLResult) else set(b)
    if len(sa) != len(sb):
        raise ValueError(f"overlap needs equal sizes, got {len(sa)} and {len(sb)}")
    if not sa:
        raise ValueError("overlap of empty summaries is undefined")
    return OverlapScore(len(sa & sb), len(sa))
