import json
import shutil

import pytest

from mvk import scenario as sc
from mvk.cli import EXIT_BUDGET, EXIT_MISMATCH, EXIT_OK, EXIT_VALIDATION, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_obstruct_stable(capsys):
    code, out, _ = run(capsys, "obstruct", "--stable", "ex-4.3-quartic")
    assert code == EXIT_OK
    assert out == "OBSTRUCTED [stable] 2{E1} − {E1∩E2}\n"


def test_obstruct_json(capsys):
    code, out, _ = run(capsys, "--json", "obstruct", "--rational", "smooth-specialization.json")
    data = json.loads(out)
    assert code == EXIT_OK
    assert data["status"] == "NOT_OBSTRUCTED" and data["rule"] == "rational"
    assert data["class"] == "{P^3}"
    # the flag is also accepted after the command
    code, out2, _ = run(capsys, "obstruct", "--rational", "--json", "smooth-specialization")
    assert out2 == out


def test_spec_r_prints_one(capsys):
    assert run(capsys, "vol", "spec-R")[1] == "1\n"
    assert run(capsys, "vol", "--grade", "1", "spec-R")[1] == "t\n"


def test_vol_bir_and_sb(capsys):
    assert run(capsys, "vol-bir", "ex-4.3-quartic")[1] == "2{E1} − {E1∩E2×P^1}\n"
    assert run(capsys, "vol-sb", "ex-4.6-del-pezzo")[1] == "2{pt} − {E1∩E2}\n"


def test_reduce_and_faces(capsys):
    assert run(capsys, "reduce", "--mod", "tau", "ex-4.3-quartic")[1] == \
        "-L*E1∩E2° + E1° + E2°\n"
    code, out, _ = run(capsys, "--json", "faces", "cone-square")
    data = json.loads(out)
    assert data["counts_by_dim"] == [1, 4, 4, 1] and data["euler_number"] == 0
    assert "t^2 + 2*t*L + L^2" in run(capsys, "faces", "cone-square")[1]


def test_equivariant(capsys):
    out = run(capsys, "equivariant", "--restrict", "2", "eq-mixed")[1]
    assert out == "t*D̃°[μ3] - L*D̃°[μ3] + B̃°[μ3] + Ã°\n"
    code, out, _ = run(capsys, "equivariant", "--check-commute", "eq-double-cover")
    assert code == EXIT_OK


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", "ex-4.3-quartic")
    assert code == EXIT_OK and out.startswith("valid: 3 strata")


def test_schema_errors_exit_2(capsys, tmp_path):
    raw = json.loads(sc.resolve_path("spec-R").read_text())
    raw["surprise"] = 1
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(raw))
    code, _, err = run(capsys, "vol", str(p))
    assert code == EXIT_VALIDATION and "SchemaError" in err
    code, _, err = run(capsys, "--json", "vol", str(p))
    assert json.loads(err)["error"] == "SchemaError"
    p.write_text("{not json")
    assert run(capsys, "vol", str(p))[0] == EXIT_VALIDATION
    assert run(capsys, "vol", str(tmp_path / "missing.json"))[0] == EXIT_VALIDATION


def test_invalid_complex_exits_2(capsys, tmp_path):
    raw = {"schema": 1, "name": "chain", "complex": {"fiber_dim": 2, "strata": [
        {"id": "E0", "codim": 0}, {"id": "E1", "codim": 1}, {"id": "E2", "codim": 2}],
        "contains": [["E2", "E1"], ["E1", "E0"]]}}
    p = tmp_path / "chain.json"
    p.write_text(json.dumps(raw))
    code, _, err = run(capsys, "--json", "validate", str(p))
    assert code == EXIT_VALIDATION
    codes = {d["code"] for d in json.loads(err)["diagnostics"]}
    assert "IntervalConditionFailed" in codes


def test_budget_exits_3(capsys):
    code, _, err = run(capsys, "--budget", "1", "obstruct", "ex-4.3-quartic")
    assert code == EXIT_BUDGET and "SearchBudget" in err


def test_corpus_matches_golden(capsys):
    code, out, _ = run(capsys, "corpus")
    assert code == EXIT_OK
    assert out.rstrip().endswith("7/7 scenarios match golden files")


def test_corpus_dir_env_and_mismatch(capsys, tmp_path, monkeypatch):
    shutil.copytree(sc.corpus_dir(), tmp_path / "c")
    monkeypatch.setenv("MVK_CORPUS_DIR", str(tmp_path / "c"))
    assert sc.corpus_dir() == tmp_path / "c"
    assert run(capsys, "corpus")[0] == EXIT_OK
    g = tmp_path / "c" / "golden" / "ex-4.3-quartic.golden.json"
    data = json.loads(g.read_text())
    data["vol_sb"] = "tampered"
    g.write_text(json.dumps(data))
    code, out, _ = run(capsys, "corpus")
    assert code == EXIT_MISMATCH
    assert "6/7 scenarios match golden files" in out


def test_corpus_json_is_deterministic(capsys):
    first = run(capsys, "--json", "corpus")[1]
    second = run(capsys, "--json", "corpus")[1]
    assert first == second
    json.loads(first)


def test_unknown_command():
    with pytest.raises(SystemExit):
        main(["frobnicate"])
