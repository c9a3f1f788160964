import io
import json
import subprocess
import sys

import pytest

from epiforget.cli import main
from epiforget.kripke import loads_model, model_from_json

from conftest import fixture_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_true(capsys):
    assert run(capsys, "check", fixture_path("knows_p.json"), "K p")[:2] == (0, "true\n")
    code, out, _ = run(capsys, "check", fixture_path("knows_p.json"), "[fw p](~(K p) & ~(K ~p))")
    assert (code, out) == (0, "true\n")


def test_check_false_with_trace(capsys):
    code, out, _ = run(
        capsys, "check", fixture_path("knows_p_implies_q.json"), "[fw (p -> q)] <K>(~p & q & <K>(p & q))", "--trace"
    )
    assert code == 1
    lines = out.splitlines()
    assert lines[0] == "false"
    assert "{~p,q} {p}" in lines[1] and lines[1].endswith("true")
    assert "{~p,q} {~q}" in lines[2] and lines[2].endswith("false")


def test_check_json(capsys):
    code, out, _ = run(capsys, "check", fixture_path("knows_p_implies_q.json"), "[fw (p&q)] q", "--trace", "--format", "json")
    obj = json.loads(out)
    assert obj["verdict"] is (code == 0)
    assert [t["clauses"] for t in obj["trace"]] == [["{p}", "{~p,~q}"], ["{q}", "{~p,~q}"]]


def test_check_point_override(capsys):
    code, _, _ = run(capsys, "check", fixture_path("knows_p_implies_q.json"), "p", "--point", "w1")
    assert code == 1


def test_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"worlds": ["a"],\n "relation": [}')
    code, _, err = run(capsys, "check", str(bad), "p")
    assert code == 2 and "line 2 column" in err


def test_missing_file_and_bad_formula(capsys):
    assert run(capsys, "check", "/nonexistent.json", "p")[0] == 2
    assert run(capsys, "check", fixture_path("knows_p.json"), "p &")[0] == 2
    assert run(capsys, "check", fixture_path("knows_p.json"), "[fw K p] p")[0] == 2


def test_stdin_model(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO(open(fixture_path("knows_p.json")).read()))
    assert run(capsys, "check", "-", "K p")[0] == 0


@pytest.mark.parametrize(
    "formula, expected",
    [("p <-> q", "{{p,~q},{~p,q}}"), ("T", "{}"), ("F", "{{}}"), ("~(p -> q)", "{{p},{~q}}")],
)
def test_clauses(capsys, formula, expected):
    assert run(capsys, "clauses", formula)[:2] == (0, expected + "\n")


def test_clauses_lines_and_errors(capsys):
    assert run(capsys, "clauses", "p & q", "--lines")[1] == "{p}\n{q}\n"
    assert json.loads(run(capsys, "clauses", "p | ~q", "--format", "json")[1]) == [["p", "~q"]]
    assert run(capsys, "clauses", "K p")[0] == 2


def _models(out):
    return [(r, model_from_json(r["model"])[0]) for r in json.loads(out)]


def test_forget_fw_known_atom(capsys):
    code, out, _ = run(capsys, "forget", fixture_path("knows_p.json"), "fw", "p")
    (rec, m), = _models(out)
    assert code == 0 and len(m) == 6 and rec["clauses"] == ["{p}", "{~p}"]
    assert rec["model"]["point"] == "w0#0"
    assert m.valuation["w0#1"] == set() and m.valuation["w1#2"] == {"p"}


def test_forget_fw_implication(capsys):
    _, out, _ = run(capsys, "forget", fixture_path("knows_p_implies_q.json"), "fw", "p -> q")
    recs = _models(out)
    assert [r["clauses"] for r, _ in recs] == [["{~p,q}", "{p}"], ["{~p,q}", "{~q}"]]


def test_forget_f_and_fs(capsys):
    _, out, _ = run(capsys, "forget", fixture_path("knows_p_implies_q.json"), "f", "p & q")
    assert len(_models(out)) == 2
    _, out, _ = run(capsys, "forget", fixture_path("loop_pq.json"), "fs", "p & q")
    (_, m), = _models(out)
    assert len(m) == 4


def test_forget_vacuous(capsys):
    code, out, err = run(capsys, "forget", fixture_path("loop_pq.json"), "fw", "T")
    assert code == 0 and json.loads(out) == [] and "vacuously" in err


def test_forget_fd(capsys):
    code, out, _ = run(capsys, "forget", fixture_path("s5_pq.json"), "fd", "p & q", "--pair", fixture_path("pair_s5.json"))
    (rec, m), = _models(out)
    assert code == 0 and len(m) == 6 and rec["model"]["point"] == "w#d0"
    assert m.valuation["w#d1"] == {"q"}
    _, out, _ = run(capsys, "forget", fixture_path("s5_pq.json"), "fd", "p & q", "--enumerate")
    assert len(json.loads(out)) == 4
    assert run(capsys, "forget", fixture_path("s5_pq.json"), "fd", "p & q")[0] == 2
    assert run(capsys, "forget", fixture_path("s5_pq.json"), "fd", "T", "--enumerate")[0] == 2
    assert run(capsys, "forget", fixture_path("s5_pq.json"), "fd", "p & q", "--enumerate", "--cap", "2")[0] == 3


def test_emitted_models_round_trip(capsys):
    _, out, _ = run(capsys, "forget", fixture_path("knows_p_implies_q.json"), "fw", "p & q")
    for rec in json.loads(out):
        text = json.dumps(rec["model"])
        m, point = loads_model(text)
        assert point == rec["model"]["point"]


def test_translate(capsys):
    assert run(capsys, "translate", "[fw p] K q")[1] == "K (q & q & q)\n"
    assert run(capsys, "translate", "[fs p] q")[0] == 2


def test_valid(capsys):
    code, out, _ = run(capsys, "valid", "K F <-> [f (p|q)](K F)", "--worlds", "3", "--atoms", "p,q")
    assert (code, out) == (0, "no-countermodel-at-bound\n")
    code, out, _ = run(capsys, "valid", "K p -> p", "--worlds", "2", "--format", "json")
    obj = json.loads(out)
    assert code == 1 and obj["verdict"] == "countermodel" and obj["countermodel"]["point"] == "w0"
    assert run(capsys, "valid", "K p -> p", "--frame", "T", "--jobs", "2")[0] == 0
    assert run(capsys, "valid", "p", "--worlds", "3", "--atoms", "p,q,r,s", "--cap", "100")[0] == 3


def test_bisim(capsys, tmp_path):
    _, out, _ = run(capsys, "forget", fixture_path("knows_p_implies_q.json"), "fw", "p -> q")
    paths = []
    for i, rec in enumerate(json.loads(out)):
        path = tmp_path / f"m{i}.json"
        path.write_text(json.dumps(rec["model"]))
        paths.append(str(path))
    assert run(capsys, "bisim", *paths)[:2] == (1, "not-bisimilar\n")
    assert run(capsys, "bisim", paths[0], paths[0])[:2] == (0, "bisimilar\n")


def test_frame(capsys):
    code, out, _ = run(capsys, "frame", fixture_path("s5_pq.json"))
    assert code == 0 and out.split() == ["serial", "reflexive", "transitive", "symmetric", "euclidean"]
    obj = json.loads(run(capsys, "frame", fixture_path("knows_p.json"), "--format", "json")[1])
    assert obj["properties"] == ["transitive"] and "K4" in obj["classes"]


def test_usage_errors(capsys):
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys)[0] == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "epiforget", "clauses", "p & q"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and proc.stdout == "{{p},{q}}\n"
