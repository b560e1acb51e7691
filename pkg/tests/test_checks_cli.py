import json

import pytest

from fusionlab.checks import CHECKS, CheckSpec, run_check, run_suite, suite_exit_code
from fusionlab.cli import main
from fusionlab.cohom import group_cohomology
from fusionlab.corpus import builtin_group
from fusionlab.modules import GModule


def test_cartan_eilenberg_s4():
    rep = run_check("cartan-eilenberg", CheckSpec("cartan-eilenberg", "S4", 2, "trivial", 3))
    assert rep.verdict == "pass" and rep.exit_code == 0
    oracle = [b.dim for b in group_cohomology(builtin_group("S4").full, GModule.trivial(2, builtin_group("S4").full), 3)]
    assert [r["lhs_dim"] for r in rep.degrees] == oracle


def test_centric_nerve_check_p_group():
    rep = run_check("theorem-a", CheckSpec("theorem-a", "D8", 2))
    assert rep.verdict == "pass"


def test_coprime_s3():
    rep = run_check("coprime", CheckSpec("coprime", "S3", 3, "sign", 3))
    assert rep.verdict == "pass"
    assert [r["lhs_dim"] for r in rep.degrees] == [0, 1, 1, 0]


def test_hypothesis_failures():
    assert run_check("pnilpotent", CheckSpec("pnilpotent", "S4", 2, "twisted")).exit_code == 2
    assert run_check("fixed-point-lemma", CheckSpec("fixed-point-lemma", "SL23", 3, "twisted")).exit_code == 2


def test_budget_skip(monkeypatch):
    monkeypatch.setenv("FUSIONLAB_CELL_CAP", "100")
    rep = run_check("theorem-a", CheckSpec("theorem-a", "S4", 2, max_degree=2))
    assert rep.verdict == "skipped (budget)" and rep.exit_code == 3
    assert "census" in rep.witness


def test_suite_contracts(tmp_path):
    assert run_suite([])["exit_code"] == 0
    bad = [{"check": "coprime", "group": "S3", "prime": 3, "module": "sign", "max_degree": 3,
            "expect": {"dims": [1, 1, 1, 1]}}]
    res = run_suite(bad)
    assert res["exit_code"] == 1
    assert res["reports"][0]["witness"]["expected_dims"] == [1, 1, 1, 1]


def test_exit_precedence():
    class R:
        def __init__(self, v):
            self.verdict = v
    assert suite_exit_code([R("pass"), R("skipped (budget)"), R("hypothesis-failed")]) == 2
    assert suite_exit_code([R("theorem-violated"), R("hypothesis-failed")]) == 1
    assert suite_exit_code([R("pass"), R("skipped (budget)")]) == 3


def test_every_check_named():
    assert len(CHECKS) == len(set(CHECKS)) == 14
    with pytest.raises(ValueError):
        CheckSpec("coprime", "S3", 4)


def test_cli_roundtrip(tmp_path, capsys):
    g = tmp_path / "g.json"
    g.write_text(json.dumps({"name": "S3", "degree": 3, "generators": [[[1, 2]], [[1, 2, 3]]]}))
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"prime": 3, "dim": 1, "action": [[[2]], [[1]]]}))
    assert main(["cohomology", "--group", str(g), "--prime", "3", "--module", str(m), "--max-degree", "3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["dims"] == {"0": 0, "1": 1, "2": 1, "3": 0}
    assert main(["check", "coprime", "--group", str(g), "--prime", "3", "--module", str(m),
                 "--max-degree", "3"]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "pass"
    mf = tmp_path / "empty.json"
    mf.write_text("[]")
    assert main(["suite", "--manifest", str(mf)]) == 0
    assert main(["classify", "--group", "S4", "--prime", "2"]) == 0
    classes = json.loads(capsys.readouterr().out.splitlines()[-1])["classes"]
    assert sum(c["essential"] for c in classes) == 1


def test_cli_bad_module(tmp_path, capsys):
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"prime": 3, "dim": 1, "action": [[[0]], [[1]]]}))
    assert main(["cohomology", "--group", "S3", "--prime", "3", "--module", str(m)]) == 2
    assert "InvalidModule" in capsys.readouterr().err


def test_cli_nerve_budget(monkeypatch, capsys):
    monkeypatch.setenv("FUSIONLAB_CELL_CAP", "100")
    assert main(["nerve", "--group", "S4", "--prime", "2", "--collection", "centric"]) == 3
