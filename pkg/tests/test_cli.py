import json
from fractions import Fraction

import pytest

from heightlab.cli import cmd_dispatch
from heightlab.suite import pair_e1, pair_e3
from heightlab.twisted_system import pair_from_json, pair_to_json

F = Fraction


@pytest.fixture
def e1_path(tmp_path):
    p = tmp_path / "e1.json"
    p.write_text(json.dumps(pair_to_json(pair_e1())))
    return str(p)


@pytest.fixture
def e3_path(tmp_path):
    p = tmp_path / "e3.json"
    p.write_text(json.dumps(pair_to_json(pair_e3())))
    return str(p)


@pytest.fixture
def sys_path(tmp_path):
    p = tmp_path / "sys.json"
    p.write_text(
        json.dumps(
            {
                "n": 2,
                "epsilon": "1",
                "places": [
                    {"place": "inf", "forms": [["1", "0"], ["0", "1"]], "exps": ["-3", "0"]}
                ],
            }
        )
    )
    return str(p)


def _run(args, out_path):
    code = cmd_dispatch(args + ["--out", str(out_path)])
    return code, out_path.read_text() if out_path.exists() else None


def test_validate_ok(e1_path, tmp_path):
    code, text = _run(["validate", e1_path], tmp_path / "r.json")
    assert code == 0
    data = json.loads(text)
    assert data["core_ok"] and data["normalized_ok"] and data["r"] == 2


def test_validate_dependent_forms_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(
        json.dumps(
            {"n": 2, "places": [{"place": "inf", "forms": [["1", "0"], ["2", "0"]], "exps": ["1", "-1"]}]}
        )
    )
    code, text = _run(["validate", str(bad)], tmp_path / "r.json")
    assert code == 2
    assert json.loads(text)["core_ok"] is False


def test_missing_file_exit_4(tmp_path):
    assert cmd_dispatch(["validate", str(tmp_path / "nope.json")]) == 4


def test_malformed_json_exit_4(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    assert cmd_dispatch(["validate", str(p)]) == 4


def test_special_t_unsupported_exit_3(tmp_path):
    skew = tmp_path / "skew.json"
    skew.write_text(
        json.dumps(
            {"n": 2, "places": [{"place": "inf", "forms": [["1", "2"], ["0", "1"]], "exps": ["0", "0"]}]}
        )
    )
    assert cmd_dispatch(["special-t", str(skew)]) == 3


def test_filtration_report(e3_path, tmp_path):
    code, text = _run(["filtration", e3_path], tmp_path / "f.json")
    assert code == 0
    chain = json.loads(text)["chain"]
    assert [e["dim"] for e in chain] == [0, 1, 2, 3]
    assert [e["slope"] for e in chain] == [None, "1", "0", "-1"]
    assert chain[1]["basis"] == [["1", "0", "0"]]


def test_exceptional_and_weight(e1_path, tmp_path):
    code, text = _run(["exceptional", e1_path], tmp_path / "t.json")
    assert code == 0
    assert json.loads(text)["basis"] == [["1", "0"]]

    sub = tmp_path / "sub.json"
    sub.write_text(json.dumps({"ambient": 2, "dim": 1, "basis": [["1", "0"]]}))
    code, text = _run(["weight", e1_path, str(sub)], tmp_path / "w.json")
    assert code == 0
    assert json.loads(text)["weight"] == "1"


def test_invariants_report(e1_path, tmp_path):
    code, text = _run(["invariants", e1_path], tmp_path / "i.json")
    assert code == 0
    data = json.loads(text)
    assert data["delta_L"]["factored"] == []
    assert data["H_L"]["factored"] == []
    assert data["r"] == 2
    assert data["alpha"] == "0"


def test_infima_report(e1_path, tmp_path):
    code, text = _run(["infima", e1_path, "--q", "100", "--box", "1"], tmp_path / "inf.json")
    assert code == 0
    data = json.loads(text)
    assert data["achievers"] == [[1, 0], [0, 1]]
    assert data["lambdas"][0]["factored"] == [[2, -2, 1], [5, -2, 1]]
    assert data["spans"][0]["basis"] == [["1", "0"]]


def test_minkowski_report(e1_path, tmp_path):
    code, text = _run(["minkowski", e1_path, "--q", "10", "--box", "2"], tmp_path / "m.json")
    assert code == 0
    data = json.loads(text)
    assert data["lower_ok"] and data["upper_ok"]
    assert data["product"]["factored"] == []


def test_slopes_csv(e1_path, tmp_path):
    out = tmp_path / "slopes.csv"
    code = cmd_dispatch(
        ["slopes", e1_path, "--qgrid", "10:1000:3", "--box", "4", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "Q,i,log10_lambda,slope"
    assert len(lines) == 1 + 3 * 2


def test_gap_report(e1_path, tmp_path):
    code, text = _run(
        ["gap", e1_path, "--delta", "1", "--a", "4", "--box", "3"], tmp_path / "g.json"
    )
    assert code == 0
    data = json.loads(text)
    assert data["solutions"] == [[1, 0]]
    assert data["proper"] is True


def test_scan_and_reduce(sys_path, tmp_path):
    code, text = _run(["scan", sys_path, "--hmax", "5", "--box", "5"], tmp_path / "s.json")
    assert code == 0
    data = json.loads(text)
    assert data["T_prime"]["basis"] == [["0", "1"]]
    assert any(s["x"] == [0, 1] and s["in_T_prime"] for s in data["solutions"])

    code, text = _run(["reduce", sys_path], tmp_path / "r.json")
    assert code == 0
    data = json.loads(text)
    assert data["delta"] == "1/3" and data["q_exponent"] == "3/2"
    pair = pair_from_json(data["pair"])
    assert pair.place_data(pair.places()[0]).exps == (F(-1), F(1))


def test_bounds_command(tmp_path):
    code, text = _run(
        ["bounds", "--thm", "2.3", "--n", "2", "--R", "2", "--delta", "1", "--hl", "1"],
        tmp_path / "b.json",
    )
    assert code == 0
    data = json.loads(text)
    assert data["constants"]["m0"]["value"] == "2935618714"
    assert data["log_convention"] == "ln"

    assert cmd_dispatch(["bounds", "--thm", "2.3", "--n", "1", "--R", "2", "--delta", "1", "--hl", "1"]) == 2


def test_cover_command(tmp_path):
    code, text = _run(
        ["cover", "--omega", "9/5", "--delta", "1", "--q1", "100"], tmp_path / "c.json"
    )
    assert code == 0
    data = json.loads(text)
    assert data["s"] == 2
    assert len(data["endpoints_log10"]) == 3


def test_determinism_byte_identical(e1_path, e3_path, sys_path, tmp_path):
    jobs = [
        ["filtration", e3_path],
        ["infima", e1_path, "--q", "100", "--box", "2"],
        ["bounds", "--thm", "2.3", "--n", "3", "--R", "4", "--delta", "1/2", "--hl", "7/2"],
        ["scan", sys_path, "--hmax", "4", "--box", "4"],
        ["slopes", e1_path, "--qgrid", "10:100:2", "--box", "3"],
    ]
    for k, job in enumerate(jobs):
        a = tmp_path / f"a{k}.json"
        b = tmp_path / f"b{k}.json"
        assert cmd_dispatch(job + ["--seed", "0", "--out", str(a)]) == 0
        assert cmd_dispatch(job + ["--seed", "0", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


def test_pair_round_trip_through_cli(e3_path, tmp_path):
    original = json.loads(open(e3_path).read())
    assert pair_to_json(pair_from_json(original)) == original
