import json

import pytest

from apltune.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, main
from apltune.graph import clustering_stats, path_stats, read_edgelist


def run(argv, capsys=None):
    code = main([str(a) for a in argv])
    return code


@pytest.fixture
def ws_file(tmp_path):
    out = tmp_path / "g.edges"
    assert run(["generate", "--model", "ws", "--n", 300, "--k", 3, "--p", 0.25, "--seed", 7, "--out", out]) == EXIT_OK
    return out


def test_generate_writes_graph_and_manifest(ws_file):
    g = read_edgelist(ws_file)
    assert g.n_nodes == 300 and g.n_edges == 900
    manifest = json.loads((ws_file.parent / "g.edges.manifest.json").read_text())
    assert manifest["command"] == "generate"
    assert manifest["seed"] == 7
    assert manifest["params"]["p"] == 0.25
    assert str(ws_file) in manifest["outputs"]


def test_generate_ring(tmp_path):
    out = tmp_path / "r.edges"
    assert run(["generate", "--model", "ring", "--n", 20, "--k", 2, "--seed", 0, "--out", out]) == EXIT_OK
    assert read_edgelist(out).n_edges == 40


def test_measure_roundtrip(ws_file, tmp_path, capsys):
    dist = tmp_path / "dist.csv"
    assert run(["measure", "--in", ws_file, "--dist", dist, "--seed", 1]) == EXIT_OK
    out = capsys.readouterr().out.split()
    g = read_edgelist(ws_file)
    ps = path_stats(g)
    assert out[:2] == ["300", "900"]
    assert float(out[2]) == ps.apl
    assert float(out[3]) == clustering_stats(g).global_coefficient
    assert int(out[4]) == g.degrees.min() and int(out[5]) == g.degrees.max()
    rows = dist.read_text().splitlines()
    assert rows[0] == "d,P"
    assert sum(float(r.split(",")[1]) for r in rows[1:]) == pytest.approx(1.0)


def test_tune_then_measure(ws_file, tmp_path, capsys):
    l0 = path_stats(read_edgelist(ws_file)).apl
    target = round(1.1 * l0, 3)
    out, trace = tmp_path / "g2.edges", tmp_path / "t.csv"
    argv = ["tune", "--in", ws_file, "--target-apl", target, "--tol", 0.005, "--temp0", 0.05]
    assert run(argv + ["--out", out, "--trace", trace, "--seed", 3]) == EXIT_OK
    g, h = read_edgelist(ws_file), read_edgelist(out)
    assert abs(path_stats(h).apl - target) <= 0.005
    assert clustering_stats(h).global_coefficient == clustering_stats(g).global_coefficient
    assert trace.read_text().startswith("proposal,L_before,L_after,energy,temp,outcome\n")


def test_simulate(ws_file, tmp_path):
    out = tmp_path / "d.csv"
    snaps = tmp_path / "s.txt"
    argv = ["simulate", "--in", ws_file, "--epsilon", 0.1, "--d0", 0.5, "--steps", 20, "--seed", 2]
    assert run(argv + ["--out", out, "--snapshots", snaps, "--snapshot-every", 10]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "t,d" and len(lines) == 22
    assert len(snaps.read_text().splitlines()) == 3


def test_usage_errors(tmp_path, capsys):
    assert run(["generate", "--bogus"]) == EXIT_USAGE
    assert run(["measure", "--in", tmp_path / "missing.edges"]) == EXIT_USAGE
    bad = tmp_path / "bad.edges"
    bad.write_text("3 1\n1 0\n")
    assert run(["measure", "--in", bad]) == EXIT_USAGE
    cfg = tmp_path / "spec.json"
    cfg.write_text(json.dumps({"base": {}}))
    assert run(["sweep", "--config", cfg, "--out-dir", tmp_path / "o"]) == EXIT_USAGE
    assert run(["tune", "--in", bad, "--target-apl", 2, "--apl-mode", "fast", "--out", tmp_path / "x"]) == EXIT_USAGE
    err = capsys.readouterr().err
    assert "apltune" in err or "usage" in err


def test_runtime_failure(tmp_path):
    disc = tmp_path / "disc.edges"
    disc.write_text("4 2\n0 1\n2 3\n")
    assert run(["measure", "--in", disc]) == EXIT_FAILURE


def test_seed_omitted_is_reported(tmp_path, capsys):
    out = tmp_path / "g.edges"
    assert run(["generate", "--model", "ws", "--n", 50, "--k", 2, "--p", 0.3, "--out", out]) == EXIT_OK
    err = capsys.readouterr().err
    seed = int(err.split("seed")[1])
    assert json.loads((tmp_path / "g.edges.manifest.json").read_text())["seed"] == seed


def test_replay_reproduces_bytes(ws_file, tmp_path):
    out, trace = tmp_path / "g2.edges", tmp_path / "t.csv"
    run(["tune", "--in", ws_file, "--target-apl", 6.0, "--max-proposals", 300, "--out", out, "--trace", trace, "--seed", 9])
    again = tmp_path / "again"
    assert run(["replay", tmp_path / "g2.edges.manifest.json", "--into", again]) == EXIT_OK
    assert (again / "g2.edges").read_bytes() == out.read_bytes()
    assert (again / "t.csv").read_bytes() == trace.read_bytes()
