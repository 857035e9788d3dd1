import io
import json

import pytest
import yaml

from objsum.cli import (
    EXIT_DATA,
    EXIT_NO_MATCH,
    EXIT_OK,
    EXIT_USAGE,
    load_artifact,
    main,
)
from objsum.config import ConfigError, load_config, toy_config_path

TOY = toy_config_path().parent


def run_cli(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture(scope="module")
def artifact(tmp_path_factory):
    path = tmp_path_factory.mktemp("art") / "toy.osg"
    code, text = run_cli("ingest", "--artifact", str(path))
    assert code == EXIT_OK
    assert "ingested 584 tuples, 922 links" in text
    return path


def small_config(tmp_path, **overrides):
    doc = yaml.safe_load((TOY / "config.yaml").read_text())
    doc["schema"] = str(TOY / "schema.yaml")
    doc["tuples"] = str(TOY / "tuples")
    doc["artifact"] = str(tmp_path / "toy.osg")
    doc["bench"] = {"ls": [3, 5], "repetitions": 3, "dp_timeout": 2.0, "instances": 2, "seed": 1,
                    "ns": [200, 400]}
    doc.update(overrides)
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump(doc))
    return path


def test_ingest_checksum_stable(artifact, tmp_path):
    first = load_artifact(artifact)
    again = tmp_path / "again.osg"
    code, text = run_cli("ingest", "--artifact", str(again))
    assert code == EXIT_OK
    assert f"sha256 {first.checksum}" in text
    assert load_artifact(again).checksum == first.checksum
    assert first.graph.num_tuples == 584


def test_corrupted_artifact(artifact, tmp_path, capsys):
    bad = tmp_path / "bad.osg"
    blob = bytearray(artifact.read_bytes())
    blob[-10] ^= 0xFF
    bad.write_bytes(bytes(blob))
    code, _ = run_cli("query", "--artifact", str(bad), "--keywords", "Faloutsos")
    assert code == EXIT_DATA
    assert "checksum mismatch" in capsys.readouterr().err
    bad.write_bytes(b"hello")
    assert run_cli("query", "--artifact", str(bad), "--keywords", "x")[0] == EXIT_DATA


def test_missing_artifact_is_usage_error(tmp_path, capsys):
    code, _ = run_cli("query", "--artifact", str(tmp_path / "none.osg"), "--keywords", "x")
    assert code == EXIT_USAGE
    assert "run `objsum ingest" in capsys.readouterr().err


def test_query_three_faloutsos(artifact):
    code, text = run_cli("query", "--artifact", str(artifact), "--keywords", "Faloutsos", "-l", "15")
    assert code == EXIT_OK
    blocks = text.strip().split("\n\n")
    assert len(blocks) == 3
    names = ["Christos Faloutsos", "Michalis Faloutsos", "Petros Faloutsos"]
    for block, name in zip(blocks, names):
        lines = block.splitlines()
        assert name in lines[0] and "size-15 summary" in lines[0]
        assert len(lines) == 1 + 15
        assert lines[1].startswith(f"Author: {name}")


def test_query_size_one(artifact):
    code, text = run_cli("query", "--artifact", str(artifact), "--keywords", "Christos", "-l", "1")
    assert code == EXIT_OK
    lines = text.strip().splitlines()
    assert len(lines) == 2 and lines[1].startswith("Author: Christos Faloutsos")


def test_query_exit_codes(artifact, capsys):
    a = ("--artifact", str(artifact))
    assert run_cli("query", *a, "--keywords", "Nobody")[0] == EXIT_NO_MATCH
    assert run_cli("query", *a, "--keywords", "x", "--relation", "Nope")[0] == EXIT_USAGE
    assert run_cli("query", *a, "--keywords", "x", "--relation", "Writes")[0] == EXIT_USAGE
    assert run_cli("query", *a, "--keywords", "Faloutsos", "-l", "0")[0] == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["query", *a])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["query", *a, "--keywords", "x", "--algo", "magic"])
    assert exc.value.code == EXIT_USAGE


@pytest.mark.parametrize("algo", ["dp", "bottom-up", "top-path"])
@pytest.mark.parametrize("prelim", ["--prelim", "--no-prelim"])
def test_query_deterministic(artifact, algo, prelim):
    argv = ("query", "--artifact", str(artifact), "--keywords", "Faloutsos", "-l", "8", "--algo", algo, prelim)
    first = run_cli(*argv)
    assert first[0] == EXIT_OK
    assert run_cli(*argv) == first


def test_query_structured(artifact):
    code, text = run_cli("query", "--artifact", str(artifact), "--keywords", "Michalis", "-l", "6",
                         "--format", "structured")
    assert code == EXIT_OK
    (doc,) = json.loads(text)
    assert doc["ds"] == "Author:2" and doc["l"] == 6

    def count(node):
        return 1 + sum(count(c) for c in node["children"])

    assert count(doc["summary"]) == 6
    assert doc["summary"]["display"] == "Michalis Faloutsos"


def test_prelim_and_complete_agree_for_dp(artifact):
    base = ("query", "--artifact", str(artifact), "--keywords", "Petros", "-l", "10", "--algo", "dp",
            "--format", "structured")
    pre = json.loads(run_cli(*base, "--prelim")[1])[0]
    full = json.loads(run_cli(*base, "--no-prelim")[1])[0]
    assert pre["input_size"] < full["input_size"]
    assert pre["importance"] <= full["importance"] + 1e-9


def test_dp_guard_advisory(artifact, capsys, monkeypatch):
    monkeypatch.setattr("objsum.cli.DP_GUARD_N", 10)
    code, _ = run_cli("query", "--artifact", str(artifact), "--keywords", "Christos", "-l", "5",
                      "--algo", "dp", "--no-prelim")
    assert code == EXIT_OK
    assert "advisory" in capsys.readouterr().err


def test_config_errors(tmp_path, capsys):
    missing = small_config(tmp_path, rank={"mode": "file"}, scores="nope.csv")
    code, _ = run_cli("ingest", "--config", str(missing))
    assert code == EXIT_USAGE
    assert "does not exist" in capsys.readouterr().err
    with pytest.raises(ConfigError, match="scores path"):
        load_config(small_config(tmp_path, rank={"mode": "file"}))
    with pytest.raises(ConfigError, match="unknown keys"):
        load_config(small_config(tmp_path, extra=1))
    with pytest.raises(ConfigError, match="repetitions"):
        load_config(small_config(tmp_path, bench={"repetitions": 2}))
    assert run_cli("ingest", "--config", str(tmp_path / "absent.yaml"))[0] == EXIT_USAGE


def test_scores_from_file(tmp_path):
    scores = tmp_path / "scores.csv"
    scores.write_text("relation,key,score\nAuthor,2,50\nPaper,1,10\n")
    cfg = small_config(tmp_path, rank={"mode": "file"}, scores=str(scores))
    assert run_cli("ingest", "--config", str(cfg))[0] == EXIT_OK
    code, text = run_cli("query", "--config", str(cfg), "--keywords", "Michalis", "-l", "2",
                         "--format", "structured")
    assert code == EXIT_OK
    assert json.loads(text)[0]["summary"]["weight"] == 50.0


def test_bad_suite_exits_usage():
    with pytest.raises(SystemExit) as exc:
        main(["bench", "--suite", "everything"])
    assert exc.value.code == EXIT_USAGE


def test_bench_quick_run(tmp_path):
    cfg = small_config(tmp_path)
    assert run_cli("ingest", "--config", str(cfg))[0] == EXIT_OK
    out = tmp_path / "reports"
    code, text = run_cli("bench", "--config", str(cfg), "--suite", "all", "--out", str(out))
    assert code == EXIT_OK
    names = {p.name for p in out.iterdir()}
    for stem in ("quality", "runtime", "scaling", "l_sweep"):
        assert {f"{stem}.csv", f"{stem}.json", f"{stem}_long.csv"} <= names
    assert {"quality.png", "prelim_sizes.png", "scaling.png", "l_sweep.png"} <= names
    assert "wrote" in text
    assert run_cli("bench", "--config", str(cfg), "--repetitions", "2", "--out", str(out))[0] == EXIT_USAGE


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "objsum", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "ingest" in proc.stdout
