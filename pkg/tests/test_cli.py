import json

import pytest

from thetarho import cli
from thetarho.catalog import data_path

EX3_MAP = str(data_path("example3_map.json"))
HALVING = str(data_path("halving_map.json"))
EX5 = str(data_path("example5_problem.json"))
DESK = str(data_path("desk_problem.json"))
ZERO = str(data_path("zero_rhs_problem.json"))


def run(argv, tmp_path, name="report.json"):
    out = tmp_path / name
    code = cli.main([*argv, "--out", str(out)])
    return code, json.loads(out.read_text())


def test_certify_example_map_is_negative(tmp_path):
    code, rep = run(["certify", "--map", EX3_MAP, "--theta", "exp-sqrt-texp", "--rho", "ciric-2", "--k", "0.3678794411714423"], tmp_path)
    assert code == 1
    assert list(rep) == ["schema_version", "command", "inputs", "results", "discrepancies"]
    assert rep["results"]["verdict"] == "violated"
    strata = {s["case"]: s for s in rep["results"]["strata"]}
    assert strata[1]["violations"] == rep["results"]["violation_count"]
    assert rep["discrepancies"][0]["case"] == 1


def test_certify_halving_map(tmp_path):
    code, rep = run(["certify", "--map", HALVING, "--theta", "exp-sqrt", "--rho", "nadler", "--k", "0.75"], tmp_path)
    assert code == 0
    assert rep["results"]["verdict"] == "certified-on-sample"
    assert rep["results"]["kmin"] == pytest.approx(0.5**0.5)


def test_reports_are_byte_identical_for_the_same_seed(tmp_path):
    argv = ["certify", "--map", HALVING, "--theta", "log-shift", "--rho", "reich", "--k", "0.9", "--seed", "7"]
    cli.main([*argv, "--out", str(tmp_path / "a.json")])
    cli.main([*argv, "--out", str(tmp_path / "b.json")])
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_solve(tmp_path):
    code, rep = run(["solve", "--map", HALVING, "--x0", "1"], tmp_path)
    assert code == 0
    assert rep["results"]["algorithm"] == "nearest-point"
    assert rep["results"]["points"][:3] == [1.0, 0.5, 0.25]
    assert cli.main(["solve", "--map", HALVING, "--x0", "3"]) == 2


def test_fde_check(tmp_path, capsys):
    code, rep = run(["fde", "check", "--problem", EX5], tmp_path)
    assert code == 0
    cond = rep["results"]["condition"]
    assert cond["lhs"] == pytest.approx(0.83145, abs=1e-4)
    assert not rep["results"]["conditions"]["strict-d"]["lhs"] > cond["lhs"]
    assert rep["results"]["envelopes"]["passed"]
    code, alias = run(["fde", "check", "--problem", EX5, "--variant", "paper-example"], tmp_path, "alias.json")
    assert alias["inputs"]["variant"] == "dropped-factorials"
    assert cli.main(["fde", "check", "--problem", EX5, "--tau", "0.5"]) == 1
    capsys.readouterr()


def test_fde_solve(tmp_path):
    code, rep = run(["fde", "solve", "--problem", ZERO], tmp_path)
    assert code == 0 and rep["results"]["residual"] <= 1e-10
    csv_path = tmp_path / "sol.csv"
    code, rep = run(["fde", "solve", "--problem", DESK, "--csv", str(csv_path)], tmp_path)
    assert code == 0 and rep["results"]["residual"] <= 1e-6
    assert csv_path.read_text().startswith("t,value")
    assert len(rep["results"]["solution"]["values"]) == rep["results"]["solution"]["M"] + 1


def test_repro_example3(tmp_path, capsys):
    code, rep = run(["repro", "example-3"], tmp_path)
    table = capsys.readouterr().out
    assert code == 0 and "agreement" in table
    rows = {r["case"]: r for r in rep["results"]["cases"]}
    assert rows[2]["agreement"] and rows[2]["H"] == pytest.approx(10 / 9)
    assert not rows[1]["agreement"] and rows[1]["H"] == pytest.approx(8 / 9)
    assert rep["results"]["weak_theta_at_one_ninth"]["all_violated"]


def test_repro_example5(tmp_path, capsys):
    code, rep = run(["repro", "example-5"], tmp_path)
    capsys.readouterr()
    rows = {r["quantity"]: r for r in rep["results"]["rows"]}
    assert rows["gamma2"]["published"] == 0.5727
    assert rows["gamma1 (dropped-factorials)"]["agreement"]
    assert rows["lhs"]["agreement"]
    assert [d["quantity"] for d in rep["discrepancies"]] == ["gamma2"]


def test_stdout_is_json_without_out(capsys):
    assert cli.main(["solve", "--map", HALVING, "--x0", "0.5"]) == 0
    assert json.loads(capsys.readouterr().out)["command"] == "solve"


@pytest.mark.parametrize(
    "content",
    ["{", "[]", '{"metric": {"kind": "abs"}}', '{"metric": {"kind": "absolute-difference"}, "map": {"kind": "evens-ladder"}}'],
)
def test_malformed_maps_exit_2(tmp_path, content, capsys):
    f = tmp_path / "map.json"
    f.write_text(content)
    assert cli.main(["certify", "--map", str(f), "--theta", "exp-sqrt", "--rho", "nadler", "--k", "0.5"]) == 2
    assert "error" in capsys.readouterr().err


def test_bad_problems_exit_2(tmp_path, capsys):
    doc = json.loads(open(EX5).read())
    f = tmp_path / "p.json"
    f.write_text(json.dumps({**doc, "beta": 7}))
    assert cli.main(["fde", "check", "--problem", str(f)]) == 2
    assert cli.main(["fde", "solve", "--problem", str(tmp_path / "missing.json")]) == 2
    capsys.readouterr()


@pytest.mark.parametrize(
    "argv",
    [
        ["certify", "--map", HALVING, "--rho", "nadler", "--k", "0.5"],
        ["certify", "--map", HALVING, "--theta", "nope", "--rho", "nadler", "--k", "0.5"],
        ["repro", "example-4"],
        ["fde", "check", "--problem", EX5, "--variant", "other"],
        ["solve", "--map", HALVING, "--x0", "abc"],
        [],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(argv)
    assert info.value.code == 2
    capsys.readouterr()


def test_invalid_k_exits_2(capsys):
    assert cli.main(["certify", "--map", HALVING, "--theta", "exp-sqrt", "--rho", "nadler", "--k", "1.5"]) == 2
    capsys.readouterr()
