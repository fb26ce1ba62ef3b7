from __future__ import annotations

import json
import math

import pytest

from spreadlab.cli import main, parse_edges, parse_grid, parse_number


def run(capsys, *argv):
    code = main(["--deterministic", *argv])
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_parsers():
    assert parse_number("2/3") == 2 / 3
    assert parse_number("1e-3") == 1e-3
    assert parse_edges("0-1, 1-2") == [(0, 1), (1, 2)]
    assert parse_grid("20,20,10,10") == (20, 20, 10, 10)


def test_spread_graph(capsys):
    code, doc = run_json(capsys, "spread", "graph", "--n", "4", "--edges", "0-1,1-2,2-3,3-0")
    assert code == 0
    assert doc["schema_version"] == 1 and doc["command"] == "spread graph"
    assert doc["spread"] == pytest.approx(4.0)
    assert "generated_at" not in doc


def test_timestamp_without_deterministic(capsys):
    assert main(["spread", "join", "--n1", "2", "--n2", "0", "--n3", "1"]) == 0
    assert "generated_at" in json.loads(capsys.readouterr().out)


def test_spread_join_and_bipartite(capsys):
    _, doc = run_json(capsys, "spread", "join", "--n1", "4", "--n2", "0", "--n3", "2")
    assert doc["spread"] == pytest.approx(doc["formula"], abs=1e-10)
    _, doc = run_json(capsys, "spread", "bipartite", "--p", "2", "--q", "3", "--m", "5")
    assert (doc["p"], doc["q"], doc["r"]) == (3, 2, 1)
    assert doc["spread"] == pytest.approx(4.27156, abs=1e-5)


def test_brute_labels_winner(capsys):
    _, doc = run_json(capsys, "brute", "--n", "6", "--mode", "threshold_join")
    assert doc["best_label"] == "G(6;4,0,2)"
    assert doc["co_maximizers"] == []


def test_stepgraphon_spread(capsys):
    _, doc = run_json(capsys, "stepgraphon", "spread", "--alpha", "2/3,0,0,0,0,0,1/3")
    assert doc["spread"] == pytest.approx(2 / math.sqrt(3), abs=1e-12)


def test_contour_writes_csv(capsys, tmp_path):
    out = tmp_path / "b.csv"
    code, doc = run_json(capsys, "stepgraphon", "contour", "--plot", "B", "--step", "1/20", "--out", str(out))
    assert code == 0 and doc["csv"] == str(out)
    assert out.read_text().startswith("x,y,spread\n")


def test_verify_case_exit_codes(capsys, tmp_path):
    code, doc = run_json(capsys, "verify", "case", "1|57", "--depth", "8")
    assert code == 0 and doc["verified"] and doc["report"]["status"] == "eliminated"
    assert "wall_time" not in doc["report"]
    # an eliminated case searched too shallowly is reported as not verified
    code, doc = run_json(capsys, "verify", "case", "1|57", "--depth", "1")
    assert code == 1 and not doc["verified"]


def test_verify_case_checkpoint(capsys, tmp_path):
    ck = tmp_path / "ck.json"
    code, _ = run_json(capsys, "verify", "case", "1|7", "--depth", "4", "--checkpoint", str(ck))
    assert code == 0 and ck.exists()


def test_cubic_commands(capsys):
    code, doc = run_json(capsys, "cubic", "optimize", "--z", "1e-3")
    assert code == 0
    assert doc["eps1"] == pytest.approx(doc["predicted"]["eps1"], rel=0.1)
    code, doc = run_json(capsys, "cubic", "scan", "--grid", "1/100")
    assert code == 0 and doc["verified"]


def test_bipartite_commands(capsys, tmp_path):
    _, doc = run_json(capsys, "bipartite", "seq", "--n", "5")
    assert doc["length"] == 1 and doc["within_bound"]
    _, doc = run_json(capsys, "bipartite", "gap", "--n", "40", "--eps", "1/2")
    assert doc["record"]["n"] == 40 and "meets_target" in doc
    out = tmp_path / "s.csv"
    code, doc = run_json(capsys, "bipartite", "sweep", "--n", "10", "--out", str(out))
    assert code == 0 and doc["mechanism"]["ok"]
    assert len(out.read_text().splitlines()) == 26


def test_out_file_matches_stdout(capsys, tmp_path):
    out = tmp_path / "r.json"
    _, text = run(capsys, "spread", "join", "--n1", "3", "--n2", "0", "--n3", "1", "--out", str(out))
    assert json.loads(out.read_text()) == json.loads(text)


def test_usage_errors_exit_2(capsys):
    assert main(["nonsense"]) == 2
    assert main(["spread", "graph"]) == 2
    assert main(["bipartite", "gap", "--n", "41"]) == 2
    assert main(["verify", "case", "3|6", "--depth", "1"]) == 2
    assert "error" in capsys.readouterr().err
