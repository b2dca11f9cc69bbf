import json

import pytest
from click.testing import CliRunner

from qtransfer.cli import main
from qtransfer.graphs import Graph, to_json
from qtransfer.io import read_corpus


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """One tiny end-to-end run shared by the command tests."""
    root = tmp_path_factory.mktemp("pipeline")
    runner = CliRunner()
    corpus = str(root / "corpus.jsonl")
    db = str(root / "db.jsonl")
    model = str(root / "model.json")

    r = runner.invoke(
        main,
        ["generate", "--n", "8", "--per-class", "2", "--seed", "0", "--out", corpus],
    )
    assert r.exit_code == 0, r.output
    r = runner.invoke(
        main,
        [
            "build", "--corpus", corpus, "--p", "1", "--starts", "2",
            "--method", "sf", "--budget", "20", "--db", db, "--model-out", model,
        ],
    )
    assert r.exit_code == 0, r.output
    return {"root": root, "corpus": corpus, "db": db, "model": model}


class TestGenerate:
    def test_writes_corpus(self, runner, tmp_path):
        out = str(tmp_path / "c.jsonl")
        r = runner.invoke(
            main, ["generate", "--n", "8", "--per-class", "1", "--out", out]
        )
        assert r.exit_code == 0
        graphs, header = read_corpus(out)
        assert len(graphs) == 5  # n_even in {0, 2, 4, 6, 8}
        # header records the producing config
        assert header["n"] == 8 and header["per_class"] == 1

    def test_bad_config_exit_2(self, runner, tmp_path):
        out = str(tmp_path / "c.jsonl")
        r = runner.invoke(main, ["generate", "--n", "2", "--per-class", "1", "--out", out])
        assert r.exit_code == 2

    def test_infeasible_exit_3(self, runner, tmp_path):
        # degree cap 3 leaves a single graph in the all-even class at n=6,
        # so a second distinct member cannot exist
        out = str(tmp_path / "c.jsonl")
        r = runner.invoke(
            main,
            ["generate", "--n", "6", "--max-degree", "3", "--per-class", "2", "--out", out],
        )
        assert r.exit_code == 3


class TestSolve:
    def test_prints_cut(self, runner, tmp_path, k4):
        path = tmp_path / "g.json"
        path.write_text(to_json(k4))
        r = runner.invoke(main, ["solve", "--graph", str(path)])
        assert r.exit_code == 0
        payload = json.loads(r.output)
        assert payload["cstar"] == 4
        assert payload["assignment"][0] == "0"

    def test_cap_exit_4(self, runner, tmp_path):
        g = Graph(30, tuple((i, i + 1) for i in range(29)))
        path = tmp_path / "g.json"
        path.write_text(to_json(g))
        r = runner.invoke(main, ["solve", "--graph", str(path), "--cap", "24"])
        assert r.exit_code == 4


class TestOptimize:
    def test_writes_records(self, runner, tmp_path, k4):
        gpath = tmp_path / "g.json"
        gpath.write_text(to_json(k4))
        out = tmp_path / "opt.json"
        r = runner.invoke(
            main,
            ["optimize", "--graph", str(gpath), "--p", "1", "--starts", "2",
             "--budget", "20", "--out", str(out)],
        )
        assert r.exit_code == 0
        payload = json.loads(out.read_text())
        assert len(payload["records"]) == 2
        assert payload["records"][0]["energy"] >= payload["records"][1]["energy"]


class TestPipeline:
    def test_build_artifacts(self, pipeline):
        first = open(pipeline["db"]).readline()
        header = json.loads(first)
        assert header["kind"] == "donor-db" and header["method"] == "sf"

    def test_transfer_csv(self, runner, pipeline):
        out = str(pipeline["root"] / "transfer.csv")
        r = runner.invoke(
            main,
            ["transfer", "--db", pipeline["db"], "--model", pipeline["model"],
             "--acceptors", pipeline["corpus"], "--out", out],
        )
        assert r.exit_code == 0, r.output
        lines = open(out).read().splitlines()
        assert lines[0].startswith("# ")
        assert lines[1].split(",")[:3] == ["acceptor_id", "donor_id", "distance"]
        graphs, _ = read_corpus(pipeline["corpus"])
        assert len(lines) == 2 + 2 * len(graphs)  # nearest + farthest per acceptor

    def test_speedup_csv(self, runner, pipeline):
        out = str(pipeline["root"] / "speedup.csv")
        r = runner.invoke(
            main,
            ["speedup", "--db", pipeline["db"], "--model", pipeline["model"],
             "--acceptors", pipeline["corpus"], "--out", out],
        )
        assert r.exit_code == 0, r.output
        graphs, _ = read_corpus(pipeline["corpus"])
        lines = open(out).read().splitlines()
        assert len(lines) == 2 + 5 * len(graphs)

    def test_noise_csvs(self, runner, pipeline):
        out = str(pipeline["root"] / "noise")
        r = runner.invoke(
            main,
            ["noise", "--db", pipeline["db"], "--model", pipeline["model"],
             "--acceptors", pipeline["corpus"], "--traj", "10",
             "--scale", "0.5", "--scale", "1.0", "--out", out],
        )
        assert r.exit_code == 0, r.output
        assert (pipeline["root"] / "noise.csv").exists()
        agg_lines = open(str(pipeline["root"] / "noise_agg.csv")).read().splitlines()
        assert len(agg_lines) == 2 + 2  # two scales

    def test_report_renders_figures(self, runner, pipeline):
        root = pipeline["root"]
        # depends on the three commands above having run
        for name in ("transfer.csv", "speedup.csv", "noise_agg.csv"):
            assert (root / name).exists()
        outdir = root / "report"
        r = runner.invoke(
            main,
            ["report", "--transfer-csv", str(root / "transfer.csv"),
             "--speedup-csv", str(root / "speedup.csv"),
             "--noise-agg-csv", str(root / "noise_agg.csv"),
             "--out", str(outdir)],
        )
        assert r.exit_code == 0, r.output
        for name in ("summary.json", "transfer.png", "speedup.png", "noise.png"):
            assert (outdir / name).exists()
        summary = json.loads((outdir / "summary.json").read_text())
        assert set(summary) >= {"transfer", "speedup", "noise"}
        assert summary["speedup"]["max_speedup"] >= 1.0


class TestVersion:
    def test_version_flag(self, runner):
        r = runner.invoke(main, ["--version"])
        assert r.exit_code == 0
