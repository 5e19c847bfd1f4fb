import csv
import json
from pathlib import Path

import pytest

from tourpow.cli import main, parse_seeds
from tourpow.core import BipartiteGraph, Tournament, build_tournament, verify_power_seq
from tourpow.errors import InvariantViolation, ParseError
from tourpow.extremal import rotational_tournament
from tourpow.graphio import format_graph, load_graph, parse_graph, save_graph
from tourpow.report import Report, input_digest, verify_report

DATA = Path(__file__).parent / "data"
C3 = build_tournament(3, [(0, 1), (1, 2), (2, 0)])


# -- graph files ----------------------------------------------------------

def test_roundtrip_c3(tmp_path):
    path = tmp_path / "c3.txt"
    save_graph(path, C3)
    assert load_graph(path) == C3
    assert path.read_text() == "tournament 3\n0 1\n1 2\n2 0\n"


def test_bad_files():
    with pytest.raises(InvariantViolation):
        parse_graph("tournament 2\n0 1\n1 0\n")
    with pytest.raises(InvariantViolation):
        parse_graph("tournament 3\n0 1\n")
    with pytest.raises(ParseError) as err:
        parse_graph("tournament 2\n0 x\n")
    assert err.value.line == 2
    with pytest.raises(ParseError):
        parse_graph("graph 3\n")
    with pytest.raises(ParseError):
        parse_graph("tournament 3\n0 1\n", "bipartite")


def test_heawood_file():
    g = load_graph(DATA / "heawood.txt", "bipartite")
    assert isinstance(g, BipartiteGraph)
    assert set(g.degrees_a()) == set(g.degrees_b()) == {3}
    assert parse_graph(format_graph(g)) == g


# -- reports --------------------------------------------------------------

def test_report_roundtrip_and_verify(rot63):
    witness = [(2 * i) % 63 for i in range(63)]
    rep = Report("oracle", input_digest(rot63), 0, {}, dict(status="Found"), k=1, kind="cycle", witness=witness)
    again = Report.from_json(rep.to_json())
    assert again == rep
    ok, why = verify_report(again, rot63)
    assert ok, why
    assert not verify_report(again, rotational_tournament(61))[0]
    bad = Report("oracle", input_digest(rot63), 0, {}, dict(status="Found"), k=16, kind="cycle", witness=witness)
    assert not verify_report(bad, rot63)[0]


def test_report_witness_contract():
    with pytest.raises(ValueError):
        Report("oracle", "sha256:x", 0, {}, dict(status="Found"))
    with pytest.raises(ValueError):
        Report("oracle", "sha256:x", 0, {}, dict(status="ExhaustedNone"), witness=[0])


# -- command line ------------------------------------------------------------

def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def test_usage_errors(capsys):
    assert run(capsys, "oracle", "--frobnicate", "x")[0] == 1
    assert run(capsys, "no-such-command")[0] == 1
    assert run(capsys, "oracle", "/nonexistent/file")[0] == 1
    assert run(capsys, "generate", "rotational", "--n", "8")[0] == 1
    assert run(capsys, "generate", "rotational", "--k", "0", "--n", "7")[0] == 1


def test_generate_and_analyze(tmp_path, capsys):
    g = tmp_path / "r9.txt"
    meta = tmp_path / "meta.json"
    assert run(capsys, "generate", "rotational", "--n", 9, "--out", g, "--meta", meta)[0] == 0
    assert load_graph(g) == rotational_tournament(9)
    assert json.loads(meta.read_text())["input_digest"] == input_digest(rotational_tournament(9))
    code, cap = run(capsys, "analyze", g, "--k", 2)
    rep = json.loads(cap.out)
    assert code == 0 and rep["extra"]["min_semidegree"] == 4 and rep["extra"]["regularity_defect"] == 0


def test_oracle_cube_free(tmp_path, capsys):
    g = tmp_path / "cf.txt"
    assert run(capsys, "generate", "cube-free", "--t", 5, "--out", g)[0] == 0
    code, cap = run(capsys, "oracle", g, "--k", 3, "--kind", "cycle")
    assert code == 2
    rep = json.loads(cap.out)
    assert rep["outcome"]["status"] == "ExhaustedNone" and rep["witness"] is None


def test_oracle_budget(tmp_path, capsys):
    g = tmp_path / "r.txt"
    run(capsys, "generate", "random", "--n", 13, "--seed", 3, "--out", g)
    assert run(capsys, "oracle", g, "--k", 2, "--budget-nodes", 3)[0] == 4


def test_pipeline_and_verify(tmp_path, capsys):
    g = tmp_path / "r63.txt"
    rep_path = tmp_path / "rep.json"
    run(capsys, "generate", "rotational", "--n", 63, "--out", g)
    code, _ = run(capsys, "pipeline", "cut-dense", g, "--k", 2, "--out", rep_path)
    assert code == 0
    rep = Report.load(rep_path)
    assert rep.status == "Found" and verify_power_seq(load_graph(g), rep.witness, 2, "cycle")
    assert run(capsys, "verify-report", rep_path, g)[0] == 0
    # a tampered witness is caught
    data = json.loads(rep_path.read_text())
    data["witness"][0], data["witness"][1] = data["witness"][1], data["witness"][0]
    rep_path.write_text(json.dumps(data))
    assert run(capsys, "verify-report", rep_path, g)[0] == 3


def test_pipeline_staged(tmp_path, capsys):
    g = tmp_path / "t.txt"
    save_graph(g, Tournament([((1 << 20) - 1) & ~((1 << (v + 1)) - 1) for v in range(20)]))
    code, cap = run(capsys, "pipeline", "cut-dense", g, "--k", 2)
    assert code == 3 and json.loads(cap.out)["outcome"]["status"] == "StagedFailure"


def test_construct_verify(capsys):
    code, cap = run(capsys, "construct-verify", "krr-free", "--q", 2, "--k", 4)
    assert code == 0 and json.loads(cap.out)["outcome"]["status"] == "VerdictPass"
    assert run(capsys, "construct-verify", "cube-free", "--t", 5, "--oracle")[0] == 2


def test_batch(tmp_path, capsys):
    out_csv = tmp_path / "sweep.csv"
    reports = tmp_path / "reps"
    code, cap = run(capsys, "batch", "rotational", "--n", 31, "--seeds", "0:3", "--csv", out_csv,
                    "--reports", reports)
    rows = list(csv.DictReader(out_csv.open()))
    assert len(rows) == 3 and [r["seed"] for r in rows] == ["0", "1", "2"]
    assert "found" in cap.err
    for r in rows:
        rep = Report.load(reports / f"run_{r['seed']}.json")
        assert rep.status == r["outcome"]
    assert code == max((0 if r["outcome"] == "Found" else 3) for r in rows)


def test_batch_empty(capsys):
    code, cap = run(capsys, "batch", "random", "--n", 20, "--seeds", "")
    assert code == 0 and cap.out.strip() == "seed,n,k,branch,outcome,stage,wall_millis,margins"


def test_batch_worst_class(capsys):
    # n=11 random tournaments: some have a squared Hamilton cycle, most do not
    code, cap = run(capsys, "batch", "random", "--n", 11, "--command", "oracle", "--seeds", "0:8")
    outcomes = {r["outcome"] for r in csv.DictReader(cap.out.splitlines())}
    expected = 2 if "ExhaustedNone" in outcomes else 0
    assert code == expected


def test_parse_seeds():
    assert parse_seeds("2:5") == [2, 3, 4]
    assert parse_seeds("1,7") == [1, 7]
    assert parse_seeds(" ") == []
