"""Size-l object summaries over relational data."""

from .datagraph import DataGraph, SchemaDef, TupleId, find_ds, load_schema, load_tuples
from .gds import AffinityConfig, annotate_stats, build_gds
from .importance import object_rank, preset
from .osgen import OsTree, generate_os, render
from .prelim import generate_prelim
from .summarize import bottom_up, brute_force, dp_optimal, top_path

__all__ = [
    "AffinityConfig", "DataGraph", "OsTree", "SchemaDef", "TupleId", "annotate_stats", "bottom_up",
    "brute_force", "build_gds", "dp_optimal", "find_ds", "generate_os", "generate_prelim", "load_schema",
    "load_tuples", "object_rank", "preset", "render", "top_path",
]
__version__ = "0.1.0"
