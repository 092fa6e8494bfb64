import json

import pytest

from batsp.cli import main
from batsp.constructions import gen_random_metric
from batsp.exceptions import ParseError
from batsp.files import parse_instance, parse_json_instance


def write_instance(tmp_path, inst, name="inst.json"):
    path = tmp_path / name
    path.write_text(json.dumps(inst.to_dict()))
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_json_4x4(tmp_path):
    path = tmp_path / "a.json"
    path.write_text(json.dumps({"name": "a", "costs": [[0 if i == j else 1 for j in range(4)] for i in range(4)]}))
    inst = parse_instance(path)
    assert inst.n == 4 and inst.name == "a"


def test_tsplib_full_matrix(tmp_path):
    weights = "\n".join(" ".join("9999" if i == j else str(1 + (i + j) % 2) for j in range(5)) for i in range(5))
    path = tmp_path / "t.atsp"
    path.write_text(
        "NAME: t5\nTYPE: ATSP\nDIMENSION: 5\nEDGE_WEIGHT_TYPE: EXPLICIT\n"
        f"EDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n{weights}\nEOF\n"
    )
    inst = parse_instance(path)
    assert inst.n == 5 and inst.name == "t5" and inst.cost[0, 0] == 0


def test_tsplib_unknown_keyword_warns(tmp_path):
    path = tmp_path / "t.atsp"
    path.write_text("NAME: x\nDIMENSION: 2\nCAPACITY: 3\nEDGE_WEIGHT_SECTION\n0 1\n1 0\nEOF\n")
    with pytest.warns(UserWarning):
        assert parse_instance(path).n == 2


@pytest.mark.parametrize(
    "text,field",
    [
        ('{"costs": [[0, 1], [1, 0]], "n": "two"}', "n"),
        ('{"n": 2}', "costs"),
        ('{"costs": [[0, 1], [1]]}', "costs"),
        ('{"costs": [[0, 1], [1, 0]], "seed": 1.5}', "seed"),
    ],
)
def test_malformed_json_names_field(text, field):
    with pytest.raises(ParseError) as err:
        parse_json_instance(text)
    assert err.value.field == field
    assert field in str(err.value)


def test_solve_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "solve", bad)[0] == 2
    tri = tmp_path / "tri.json"
    tri.write_text(json.dumps({"costs": [[0, 1, 5], [1, 0, 1], [1, 1, 0]]}))
    code, _, err = run(capsys, "solve", tri)
    assert code == 2 and "triangle" in err.lower()
    assert run(capsys, "solve", tri, "--closure", "--no-timings")[0] == 0
    assert run(capsys, "solve", tmp_path / "missing.json")[0] == 2


def test_size_limit_exit_code(tmp_path, capsys, monkeypatch):
    path = write_instance(tmp_path, gen_random_metric(6, 0))
    monkeypatch.setenv("BATSP_MAX_N", "5")
    assert run(capsys, "solve", path)[0] == 4


def test_deterministic_bytes(tmp_path, capsys):
    path = write_instance(tmp_path, gen_random_metric(9, 3))
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "solve", path, "--seed", 5, "--no-timings", "--out", a)[0] == 0
    assert run(capsys, "solve", path, "--seed", 5, "--no-timings", "--out", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert "timings" not in json.loads(a.read_text())


def test_report_round_trip_and_verify(tmp_path, capsys):
    path = write_instance(tmp_path, gen_random_metric(8, 1))
    rep = tmp_path / "r.json"
    run(capsys, "solve", path, "--out", rep)
    data = json.loads(rep.read_text())
    assert data["schema"] == "batsp-report/1"
    assert json.loads(json.dumps(data)) == data
    code, out, _ = run(capsys, "verify", path, rep)
    assert code == 0 and json.loads(out)["ok"]
    data["tour"]["bottleneck"] -= 1
    rep.write_text(json.dumps(data))
    assert run(capsys, "verify", path, rep)[0] == 3


def test_summary_line(tmp_path, capsys):
    path = write_instance(tmp_path, gen_random_metric(7, 2))
    code, out, _ = run(capsys, "solve", path, "--summary")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 1
    fields = lines[0].split("\t")
    assert len(fields) == 6 and int(fields[0]) == 7


def test_trace_and_dump(tmp_path, capsys):
    path = write_instance(tmp_path, gen_random_metric(6, 2))
    dot = tmp_path / "net.dot"
    code, _, err = run(capsys, "solve", path, "--trace", "--dump-network", dot)
    assert code == 0
    first = json.loads(err.splitlines()[0])
    assert {"iteration", "added_cuts", "objective"} <= set(first)
    assert dot.read_text().startswith("digraph")


def test_other_commands(tmp_path, capsys):
    inst_path = tmp_path / "g.json"
    assert run(capsys, "gen", "metric", "--n", 7, "--seed", 1, "--out", inst_path)[0] == 0
    code, out, _ = run(capsys, "lower-bound", inst_path)
    lb = json.loads(out)
    code2, out2, _ = run(capsys, "oracle", inst_path)
    assert code == code2 == 0
    assert lb["tau_star"] <= json.loads(out2)["opt_bottleneck"]
    code, out, _ = run(capsys, "thinness", inst_path)
    assert code == 0 and json.loads(out)["certified"]
    code, out, _ = run(capsys, "gen", "extreme-point", "--k", 3)
    assert code == 0 and json.loads(out)["k"] == 3
    code, out, _ = run(capsys, "gen", "counterexample", "--k", 1, "--p", 2)
    assert code == 0 and json.loads(out)["n"] == 17
    assert run(capsys, "gen", "extreme-point", "--k", 1)[0] == 2
    code, out, _ = run(capsys, "verify-construction", "extreme-point", "--k", 3)
    assert code == 0 and json.loads(out)["ok"]
    code, out, _ = run(capsys, "verify-construction", "counterexample", "--k", 1, "--p", 2)
    assert code == 0 and json.loads(out)["ok"]
    code, out, _ = run(capsys, "verify-construction", "two-connectivity", "--count", 3, "--pairs", 5)
    assert code == 0 and json.loads(out)["graphs"] == 3
    code, out, _ = run(capsys, "bench", "--sizes", "6,7", "--seeds", 2)
    assert code == 0 and len(out.splitlines()) == 5
