"""Command line: ingest a dataset, answer size-l keyword queries, run benchmarks.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 query matched nothing.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import pickle
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .config import ALGORITHM_CHOICES, FORMAT_CHOICES, Config, ConfigError, load_config, toy_config_path
from .datagraph import DataError, DataGraph, SchemaError, TupleId, find_ds, load_schema, load_tuples
from .gds import annotate_stats, build_gds
from .importance import ScoreMap, load_scores, object_rank, preset
from .osgen import generate_os, render, to_structured
from .prelim import generate_prelim
from .summarize import dp_optimal, run

logger = logging.getLogger("objsum")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NO_MATCH = 0, 1, 2, 3
ARTIFACT_MAGIC = b"OBJSUM-ARTIFACT 1\n"
DP_GUARD_N = 2000
SUITES = ("quality", "runtime", "scaling", "all")


class UsageError(Exception):
    pass


class ArtifactError(DataError):
    pass


# --------------------------------------------------------------------------
# artifact


@dataclass
class Artifact:
    graph: DataGraph
    scores: ScoreMap
    checksum: str
    source: str


def save_artifact(graph: DataGraph, scores: ScoreMap, path: str | Path, source: str = "") -> str:
    """Pickle graph and scores behind a SHA-256 header; returns the checksum."""
    payload = pickle.dumps({"graph": graph, "scores": scores, "source": source},
                           protocol=pickle.HIGHEST_PROTOCOL)
    digest = hashlib.sha256(payload).hexdigest()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(ARTIFACT_MAGIC)
        fh.write(f"sha256:{digest}\n".encode())
        fh.write(payload)
    return digest


def load_artifact(path: str | Path) -> Artifact:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise ArtifactError(f"cannot read artifact {path}: {exc.strerror}") from None
    if not blob.startswith(ARTIFACT_MAGIC):
        raise ArtifactError(f"{path}: not a graph artifact")
    rest = blob[len(ARTIFACT_MAGIC):]
    header, sep, payload = rest.partition(b"\n")
    if not sep or not header.startswith(b"sha256:"):
        raise ArtifactError(f"{path}: malformed artifact header")
    expected = header[len(b"sha256:"):].decode("ascii", "replace")
    actual = hashlib.sha256(payload).hexdigest()
    if actual != expected:
        raise ArtifactError(f"{path}: checksum mismatch (stored {expected[:12]}..., actual {actual[:12]}...)")
    doc = pickle.loads(payload)
    return Artifact(doc["graph"], doc["scores"], actual, doc.get("source", ""))


def compute_scores(cfg: Config, graph: DataGraph) -> ScoreMap:
    if cfg.rank.mode == "file":
        if cfg.scores is None or not cfg.scores.exists():
            raise DataError(f"score file {cfg.scores} does not exist")
        return load_scores(cfg.scores, graph)
    try:
        ga = preset(cfg.rank.preset, graph.schema, cfg.rank.rates, cfg.rank.damping)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    result = object_rank(graph, ga, cfg.rank.epsilon, cfg.rank.max_iters, cfg.rank.ceiling)
    logger.info("object rank: %d iterations, converged=%s", result.iterations, result.converged)
    return result.scores


# --------------------------------------------------------------------------
# commands


def _config(args) -> Config:
    cfg = load_config(args.config)
    if getattr(args, "artifact", None):
        cfg.artifact = Path(args.artifact).resolve()
    return cfg


def cmd_ingest(args, out) -> int:
    cfg = _config(args)
    cfg.check_paths()
    schema = load_schema(cfg.schema)
    graph = load_tuples(schema, cfg.tuples)
    scores = compute_scores(cfg, graph)
    graph = graph.with_importance(scores)
    digest = save_artifact(graph, scores, cfg.artifact, source=str(cfg.path))
    print(f"ingested {graph.num_tuples} tuples, {graph.num_edges} links -> {cfg.artifact}", file=out)
    print(f"sha256 {digest}", file=out)
    return EXIT_OK


def _open_artifact(cfg: Config) -> Artifact:
    if not cfg.artifact.exists():
        raise UsageError(f"artifact {cfg.artifact} not found; run `objsum ingest --config {cfg.path}` first")
    return load_artifact(cfg.artifact)


def cmd_query(args, out) -> int:
    cfg = _config(args)
    art = _open_artifact(cfg)
    graph, scores = art.graph, art.scores
    relation = args.relation or cfg.query.relation
    if relation is None:
        raise UsageError("no --relation given and the config sets no query.relation")
    if not graph.schema.has_relation(relation):
        raise UsageError(f"unknown relation {relation!r}")
    l = cfg.query.l if args.l is None else args.l
    if l < 1:
        raise UsageError(f"-l must be >= 1, got {l}")
    algo = args.algo or cfg.query.algorithm
    use_prelim = cfg.query.prelim if args.prelim is None else args.prelim
    fmt = args.format or cfg.query.format
    try:
        gds = build_gds(graph.schema, relation, cfg.affinity)
    except SchemaError as exc:
        raise UsageError(str(exc)) from None
    if use_prelim:
        gds = annotate_stats(gds, graph, scores)
    matches = find_ds(graph, relation, args.keywords)
    if not matches:
        print(f"no {relation} tuple matches {' '.join(args.keywords)!r}", file=sys.stderr)
        return EXIT_NO_MATCH
    docs, blocks = [], []
    for ds in matches:
        if use_prelim:
            tree = generate_prelim(l, ds, gds, graph, scores).tree
        else:
            tree = generate_os(ds, gds, graph, scores, max_depth=l - 1)
        if algo == "dp" and tree.n > DP_GUARD_N:
            print(f"advisory: {ds} has a {tree.n}-node summary tree, over the DP guard of {DP_GUARD_N}; "
                  "consider --algo top-path or --algo bottom-up, or --prelim", file=sys.stderr)
        res = dp_optimal(tree, l) if algo == "dp" else run(algo, tree, l)
        source = "prelim" if use_prelim else "complete"
        if fmt == "structured":
            docs.append({"ds": str(ds), "l": l, "algorithm": algo, "input": source, "input_size": tree.n,
                         "importance": res.importance, "truncated": res.truncated,
                         "summary": to_structured(tree, res.selected)})
        else:
            blocks.append(f"# {ds} {graph.display(ds)}: size-{len(res.selected)} summary of a "
                          f"{tree.n}-node {source} tree, importance {res.importance:.4f} ({algo})\n"
                          + render(tree, "text", res.selected))
    if fmt == "structured":
        print(json.dumps(docs, indent=1, ensure_ascii=False), file=out)
    else:
        print("\n\n".join(blocks), file=out)
    return EXIT_OK


def _sample_ds(graph: DataGraph, relations: Sequence[str], count: int, rng) -> list[TupleId]:
    """Up to ``count`` data subjects per relation, drawn uniformly by key."""
    picks = []
    for rel in relations:
        ids = graph.by_relation[rel]
        k = min(count, len(ids))
        picks.extend(ids[i] for i in sorted(rng.choice(len(ids), size=k, replace=False)))
    return picks


def cmd_bench(args, out) -> int:
    from .eval import bench, plots, quality, reports

    cfg = _config(args)
    out_dir = Path(args.out)
    suites = ("quality", "runtime", "scaling") if args.suite == "all" else (args.suite,)
    bc = cfg.bench
    ls = args.ls or bc.ls
    reps = args.repetitions or bc.repetitions
    if reps < 3:
        raise UsageError("--repetitions must be >= 3")
    written = []
    if {"quality", "runtime"} & set(suites):
        art = _open_artifact(cfg)
        graph, scores = art.graph, art.scores
        relations = bc.relations or [cfg.query.relation or graph.schema.relations[0].name]
        rng = np.random.default_rng(bc.seed)
        for rel in relations:
            if not graph.schema.has_relation(rel):
                raise UsageError(f"unknown bench relation {rel!r}")
        sample = _sample_ds(graph, relations, bc.instances, rng)
        gds_by_rel = {rel: annotate_stats(build_gds(graph.schema, rel, cfg.affinity), graph, scores)
                      for rel in relations}
    if "quality" in suites:
        instances = []
        for ds in sample:
            gds = gds_by_rel[ds.relation]
            tree = generate_os(ds, gds, graph, scores, max_depth=max(ls) - 1)
            instances.append(quality.Instance(
                str(ds), tree, lambda l, ds=ds, gds=gds: generate_prelim(l, ds, gds, graph, scores).tree))
        rep = quality.quality_suite(instances, ls)
        written += reports.write_report(rep, out_dir, "quality")
        written.append(plots.plot_quality(rep, out_dir / "quality.png"))
        print(reports.format_table(rep.summary(), ["algorithm", "input", "l", "mean_ratio", "min_ratio",
                                                   "instances", "mean_os_size", "mean_input_size"]), file=out)
    if "runtime" in suites:
        runtime = bench.BenchReport()
        for rel in relations:
            ds_list = [d for d in sample if d.relation == rel]
            part = bench.bench_suite(graph, gds_by_rel[rel], ds_list, ls, reps, scores,
                                     dp_timeout=bc.dp_timeout)
            runtime.cells.extend(part.cells)
        written += reports.write_report(runtime, out_dir, "runtime")
        written.append(plots.plot_prelim_sizes(runtime, out_dir / "prelim_sizes.png"))
        print(_bench_summary(runtime, reports), file=out)
    if "scaling" in suites:
        scaling = bench.scaling_suite(bc.ns, ls, reps, bc.seed, dp_timeout=bc.dp_timeout)
        written += reports.write_report(scaling, out_dir, "scaling")
        written.append(plots.plot_scaling(scaling, out_dir / "scaling.png"))
        from .eval.synthetic import random_tree
        n = max(bc.ns)
        tree = random_tree(n, np.random.default_rng(bc.seed), "skewed")
        sweep_ls = sorted({max(1, int(n * f)) for f in (0.001, 0.2, 0.4, 0.6, 0.8, 0.99)})
        sweep = bench.l_sweep(tree, sweep_ls, "bottom-up", reps, f"skewed-n{n}")
        written += reports.write_report(sweep, out_dir, "l_sweep")
        written.append(plots.plot_l_sweep(sweep, out_dir / "l_sweep.png"))
        print(_bench_summary(scaling, reports), file=out)
    for p in written:
        print(f"wrote {p}", file=out)
    return EXIT_OK


def _bench_summary(report, reports) -> str:
    rows = [c.row() for c in report.cells if c.phase == "sizel" or c.algorithm == "prelim"]
    return reports.format_table(rows, ["instance", "algorithm", "input", "l", "n", "median_s", "timed_out", "ops"])


# --------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with status 1 instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="objsum", description="Size-l object summaries over a relational dataset.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", default=str(toy_config_path()),
                       help="YAML configuration (default: bundled toy dataset)")
        p.add_argument("--artifact", help="override the artifact path from the configuration")

    p = sub.add_parser("ingest", help="load schema and tuples, rank tuples, write the graph artifact")
    common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("query", help="size-l summaries for every tuple matching the keywords")
    common(p)
    p.add_argument("--keywords", nargs="+", required=True, help="all must occur in the tuple's text")
    p.add_argument("--relation", help="data-subject relation (default from config)")
    p.add_argument("-l", type=int, help="summary size (default from config)")
    p.add_argument("--algo", choices=ALGORITHM_CHOICES, help="size-l algorithm (default top-path)")
    p.add_argument("--prelim", action=argparse.BooleanOptionalAction, default=None,
                   help="work on the prelim-l tree instead of the complete tree (default on)")
    p.add_argument("--format", choices=FORMAT_CHOICES, help="output format (default text)")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("bench", help="quality and runtime suites; writes CSV, JSON and PNG reports")
    common(p)
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--out", default="bench_out", help="report directory")
    p.add_argument("--ls", type=int, nargs="+", help="override bench.ls")
    p.add_argument("--repetitions", type=int, help="override bench.repetitions (>= 3)")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args, out)
    except (UsageError, ConfigError) as exc:
        print(f"objsum: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, SchemaError) as exc:
        print(f"objsum: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
