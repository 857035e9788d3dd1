"""PNG figures for quality and benchmark reports (rendered off-screen)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bench import BenchReport  # noqa: E402
from .quality import QualityReport  # noqa: E402

MARKERS = {"dp": "s", "dp-merge": "D", "bottom-up": "o", "top-path": "^", "top-path-fast": "v",
           "complete": "x", "prelim": "+"}


def _finish(fig, ax, path: Path) -> Path:
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_quality(report: QualityReport, path: str | Path) -> Path:
    """Mean approximation ratio against l, one line per algorithm and input."""
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    series: dict[str, list[tuple[int, float]]] = {}
    for row in report.summary():
        series.setdefault(f"{row['algorithm']} ({row['input']})", []).append((row["l"], row["mean_ratio"]))
    for label, pts in sorted(series.items()):
        pts.sort()
        algo = label.split(" ")[0]
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker=MARKERS.get(algo, "."),
                linestyle="-" if "full" in label else "--", label=label)
    ax.set_xlabel("l")
    ax.set_ylabel("mean importance ratio")
    ax.set_ylim(top=1.01)
    return _finish(fig, ax, Path(path))


def plot_scaling(report: BenchReport, path: str | Path, l: int | None = None) -> Path:
    """Median size-l time against n (log-log); timed-out cells are omitted."""
    cells = [c for c in report.cells if c.phase == "sizel" and (l is None or c.l == l)]
    if l is None and cells:
        l = max(c.l for c in cells)
        cells = [c for c in cells if c.l == l]
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    for algo in sorted({c.algorithm for c in cells}):
        pts = sorted((c.n, c.median_s) for c in cells if c.algorithm == algo and c.median_s is not None)
        if pts:
            ax.plot([p[0] for p in pts], [p[1] for p in pts], marker=MARKERS.get(algo, "."), label=algo)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("OS size n")
    ax.set_ylabel(f"median time (s), l={l}")
    return _finish(fig, ax, Path(path))


def plot_l_sweep(report: BenchReport, path: str | Path) -> Path:
    """Median time against l for every (algorithm, n) series in ``report``."""
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    keys = sorted({(c.algorithm, c.n) for c in report.cells if c.phase == "sizel"})
    for algo, n in keys:
        pts = sorted((c.l, c.median_s) for c in report.cells
                     if c.algorithm == algo and c.n == n and c.median_s is not None)
        if pts:
            ax.plot([p[0] for p in pts], [p[1] for p in pts], marker=MARKERS.get(algo, "."),
                    label=f"{algo} n={n}")
    ax.set_xlabel("l")
    ax.set_ylabel("median time (s)")
    return _finish(fig, ax, Path(path))


def plot_prelim_sizes(report: BenchReport, path: str | Path) -> Path:
    """Prelim size as a fraction of the complete OS, per l."""
    cells = [c for c in report.cells if c.algorithm == "prelim" and c.phase == "osgen"]
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    for inst in sorted({c.instance for c in cells}):
        pts = sorted((c.l, c.extra.get("size_ratio", 0.0)) for c in cells if c.instance == inst)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=inst)
    ax.set_xlabel("l")
    ax.set_ylabel("prelim size / complete size")
    ax.set_ylim(bottom=0.0)
    return _finish(fig, ax, Path(path))
