import sys
from dataclasses import dataclass
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from objsum.cli import compute_scores  # noqa: E402
from objsum.config import Config, load_config, toy_config_path  # noqa: E402
from objsum.datagraph import DataGraph, load_schema, load_tuples  # noqa: E402
from objsum.gds import GdsTree, annotate_stats, build_gds  # noqa: E402


@dataclass
class Toy:
    cfg: Config
    graph: DataGraph
    scores: dict
    gds: GdsTree


@pytest.fixture(scope="session")
def toy() -> Toy:
    cfg = load_config(toy_config_path())
    graph = load_tuples(load_schema(cfg.schema), cfg.tuples)
    scores = compute_scores(cfg, graph)
    graph = graph.with_importance(scores)
    gds = annotate_stats(build_gds(graph.schema, "Author", cfg.affinity), graph, scores)
    return Toy(cfg, graph, scores, gds)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(acceptance.RESULTS, key=lambda s: int(s.split()[2].rstrip(":"))):
        terminalreporter.write_line(line)
