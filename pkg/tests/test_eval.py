import json

import numpy as np
import pytest

from objsum.datagraph import TupleId
from objsum.eval import bench, quality
from objsum.eval.plots import plot_l_sweep, plot_prelim_sizes, plot_quality, plot_scaling
from objsum.eval.reports import concat, format_table, long_format, read_csv, write_report
from objsum.eval.synthetic import bibliography, monotone_tree, random_tree, tree_weights
from objsum.osgen import generate_os
from objsum.prelim import generate_prelim
from objsum.summarize import dp_optimal, top_path


def toy_instances(toy, keys, l_cap=4):
    out = []
    for key in keys:
        ds = TupleId("Author", key)
        tree = generate_os(ds, toy.gds, toy.graph, toy.scores, max_depth=l_cap)
        out.append(quality.Instance(str(ds), tree,
                                    lambda l, ds=ds: generate_prelim(l, ds, toy.gds, toy.graph, toy.scores).tree))
    return out


# -- synthetic generators

def test_random_tree_shape_and_models():
    rng = np.random.default_rng(0)
    for model in ("skewed", "uniform", "integer", "monotone"):
        tree = random_tree(300, rng, model=model)
        assert tree.n == 300
        assert all(w >= 0 for w in tree.weight)
    mono = monotone_tree(500, rng)
    assert all(mono.weight[i] <= mono.weight[mono.parent[i]] for i in range(1, mono.n))
    with pytest.raises(ValueError):
        tree_weights([-1, 0], rng, model="nope")


def test_random_tree_seeded():
    a = random_tree(200, np.random.default_rng(5))
    b = random_tree(200, np.random.default_rng(5))
    assert a.parent == b.parent and a.weight == b.weight


def test_bibliography_is_consistent():
    db = bibliography(np.random.default_rng(1), 30, 100)
    assert len(db.graph.by_relation["Author"]) == 30
    assert len(db.graph.by_relation["Paper"]) == 100
    assert all(db.scores[t] == 0.0 for t in db.graph.by_relation["Writes"])
    top = db.top_authors(3)
    assert len(top) == 3 and len(set(top)) == 3


# -- quality

def test_ratio_edge_cases():
    assert quality.ratio(0.0, 0.0) == 1.0
    assert quality.ratio(5.0, 10.0) == 0.5


def test_dp_ratio_is_one(toy):
    report = quality.quality_suite(toy_instances(toy, ["1", "2", "3"]), [5, 10])
    for row in report.summary():
        if row["algorithm"] == "dp" and row["input"] == "full":
            assert row["mean_ratio"] == 1.0
        assert 0.0 < row["min_ratio"] <= 1.0 + 1e-12


def test_greedy_ratios_bounded():
    trees = [random_tree(80, np.random.default_rng(s)) for s in range(5)]
    report = quality.quality_suite(trees, [3, 8])
    assert {c.input for c in report.cells} == {"full"}
    assert all(c.ratio <= 1.0 + 1e-12 for c in report.cells)
    assert len(report.cells) == 5 * 2 * 3


def test_overlap():
    assert quality.overlap([1, 2, 3], [3, 2, 1]).value == 1.0
    assert float(quality.overlap([0, 1, 2], [0, 5, 6])) == pytest.approx(1 / 3)
    tree = random_tree(40, np.random.default_rng(2))
    r = dp_optimal(tree, 6)
    assert quality.overlap(r, r).value == 1.0
    with pytest.raises(ValueError):
        quality.overlap([1, 2], [1, 2, 3])
    with pytest.raises(ValueError):
        quality.overlap([], [])


def test_overlap_against_reference_summary(toy):
    # a reader's pick for the most prominent author: the person and five papers
    reference = {("Author", "1"), ("Paper", "1"), ("Paper", "2"), ("Paper", "3"), ("Paper", "17"),
                 ("Paper", "30")}
    tree = generate_os(TupleId("Author", "1"), toy.gds, toy.graph, toy.scores, max_depth=5)
    r = dp_optimal(tree, 6)
    got = {(tree.tuples[i].relation, tree.tuples[i].key) for i in r.selected}
    assert got == {("Author", "1"), ("Paper", "17"), ("Paper", "30"), ("Paper", "56"), ("Paper", "4"),
                   ("Paper", "18")}
    assert quality.overlap(got, reference).shared == 3


# -- timing harness

def test_timed_counts_and_timeout():
    calls = []
    times, res, timed_out = bench.timed(lambda: calls.append(1) or len(calls), 4)
    assert len(times) == 4 and res == 4 and not timed_out
    from objsum.summarize import DpTimeout

    def boom():
        raise DpTimeout("x")

    times, res, timed_out = bench.timed(boom, 3)
    assert times == [] and res is None and timed_out
    with pytest.raises(ValueError):
        bench.timed(lambda: None, 0)


def test_bench_suite_structure(toy):
    ds = [TupleId("Author", "2"), TupleId("Author", "14")]
    report = bench.bench_suite(toy.graph, toy.gds, ds, [5], repetitions=3, scores=toy.scores)
    assert len(report.find(phase="osgen")) == 4
    sizel = report.find(phase="sizel")
    assert len(sizel) == 2 * 2 * 3
    assert all(len(c.runs) == 3 for c in sizel if not c.timed_out)
    pre = report.find(phase="osgen", input="prelim")
    for c in pre:
        assert {"extracted", "skipped_relations", "bounded_joins", "full_joins", "size_ratio"} <= set(c.extra)
        assert c.extra["size_ratio"] <= 1.0
    with pytest.raises(ValueError):
        bench.bench_suite(toy.graph, toy.gds, ds, [5], repetitions=2)


def test_scaling_suite_and_sweep():
    report = bench.scaling_suite([200, 400], [5, 10], repetitions=3, seed=1)
    assert {c.n for c in report.cells} == {200, 400}
    assert report.median("bottom-up", 5, n=200) > 0
    sweep = bench.l_sweep(random_tree(300, np.random.default_rng(0)), [10, 100, 290], repetitions=3)
    assert [c.l for c in sweep.cells] == [10, 100, 290]
    with pytest.raises(KeyError):
        report.median("bottom-up", 99)


def test_dp_timeout_is_reported():
    report = bench.scaling_suite([3000], [40], repetitions=3, algorithms=("dp",), dp_timeout=0.05)
    (cell,) = report.cells
    assert cell.timed_out and cell.median_s is None


def test_unknown_runner():
    with pytest.raises(ValueError):
        bench.size_l_runner("nope")
    assert bench.size_l_runner("top-path-fast")(random_tree(30, np.random.default_rng(0)), 5).selected == \
        top_path(random_tree(30, np.random.default_rng(0)), 5).selected


# -- reports and figures

def test_reports_written(tmp_path):
    report = bench.scaling_suite([100], [5], repetitions=3)
    paths = write_report(report, tmp_path, "scaling")
    assert sorted(p.name for p in paths) == ["scaling.csv", "scaling.json", "scaling_long.csv"]
    rows = read_csv(tmp_path / "scaling.csv")
    assert len(rows) == len(report.cells)
    doc = json.loads((tmp_path / "scaling.json").read_text())
    assert len(doc["cells"]) == len(report.cells)
    long_rows = long_format(report)
    assert set(long_rows[0]) == {"instance", "algorithm", "l", "n", "metric", "value"}
    merged = concat([report, report])
    assert len(merged.cells) == 2 * len(report.cells)
    table = format_table(report.rows(), ["algorithm", "l", "median_s"])
    assert "bottom-up" in table


def test_plots_written(tmp_path, toy):
    scaling = bench.scaling_suite([100, 200], [5], repetitions=3)
    sweep = bench.l_sweep(random_tree(200, np.random.default_rng(0)), [5, 50, 150], repetitions=3)
    q = quality.quality_suite(toy_instances(toy, ["2"]), [5])
    db = bench.bench_suite(toy.graph, toy.gds, [TupleId("Author", "2")], [5], repetitions=3,
                           scores=toy.scores, algorithms=("bottom-up",))
    for path in (plot_scaling(scaling, tmp_path / "s.png"), plot_l_sweep(sweep, tmp_path / "w.png"),
                 plot_quality(q, tmp_path / "q.png"), plot_prelim_sizes(db, tmp_path / "p.png")):
        assert path.exists() and path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
