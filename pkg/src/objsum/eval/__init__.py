"""Quality and runtime evaluation: synthetic inputs, suites, reports and plots."""

from .bench import BenchCell, BenchReport, bench_suite, l_sweep, scaling_suite
from .quality import Instance, OverlapScore, QualityReport, overlap, quality_suite

__all__ = ["BenchCell", "BenchReport", "Instance", "OverlapScore", "QualityReport", "bench_suite", "l_sweep",
           "overlap", "quality_suite", "scaling_suite"]
