import json

import pytest

from ordkernel.cli import main
from ordkernel.derivation import dump
from ordkernel.parsing import parse_formula
from ordkernel.transform import toy_pipeline_input


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip(), err.strip()


def test_cmp(capsys):
    assert run(capsys, "ord", "cmp", "0", "I") == (0, "LESS", "")
    assert run(capsys, "ord", "cmp", "I", "I")[1] == "EQUAL"


def test_psi_check(capsys):
    assert run(capsys, "ord", "psi-check", "W(0+1)", "I")[:2] == (0, "admissible")
    assert run(capsys, "ord", "psi-check", "W(0+1)", "psi(I;I)")[1] == "not admissible"


@pytest.mark.parametrize("argv,expected", [
    (("add", "w^(0)", "w^(w^(0))"), "w^(w^(0))"),
    (("add", "w^(w^(0))", "w^(0)"), "w^(w^(0))+w^(0)"),
    (("pow", "0"), "w^(0)"),
    (("phi", "0", "w^(0)"), "w^(w^(0))"),
    (("tower", "1", "I+w^(0)"), "w^(I+w^(0))"),
    (("hull", "psi(I;0)", "w^(0)", "0"), "true"),
    (("hull", "psi(I;w^(0))", "w^(0)", "0"), "false"),
    (("normalize", "w^(0)+w^(w^(0))"), "w^(w^(0))"),
    (("normalize", "w^(I)"), "I"),
])
def test_calculator(capsys, argv, expected):
    assert run(capsys, "ord", *argv)[:2] == (0, expected)


def test_stages_json(capsys):
    code, out, _ = run(capsys, "ord", "stages", "0", "0", "--size", "1", "--depth", "0", "--json")
    assert code == 0
    assert json.loads(out)["terms"] == ["0", "I"]


def test_usage_errors_name_the_flag(capsys):
    code, _, err = run(capsys, "ord", "cmp", "--bogus", "0", "I")
    assert code == 1 and "--bogus" in err
    code, _, err = run(capsys, "deriv", "transform", "--op", "nope", "--out", "x")
    assert code == 1 and "--op" in err
    code, _, err = run(capsys, "deriv", "transform", "--op", "predce", "--out", "x", "--params", "a")
    assert code == 1 and "--params" in err


def test_parse_error_is_usage(capsys):
    code, _, err = run(capsys, "ord", "cmp", "(", "0")
    assert code == 1 and "position" in err


def test_check_exit_codes(tmp_path, capsys):
    f = tmp_path / "t.json"
    assert run(capsys, "deriv", "transform", "--op", "tautology", "--out", str(f),
               "--params", "formula=or(mem({},{}),mem({},{{}}))")[0] == 0
    code, out, _ = run(capsys, "deriv", "check", str(f))
    assert code == 0 and out.startswith("ok")
    obj = json.loads(f.read_text())
    obj["bound"] = "0"
    f.write_text(json.dumps(obj))
    code, out, _ = run(capsys, "deriv", "check", str(f), "--json")
    assert code == 2 and json.loads(out)["status"] == "fail"


def test_check_malformed(tmp_path, capsys):
    f = tmp_path / "bad.json"
    f.write_text(json.dumps({"op": {"gamma": "0", "theta": []}}))
    assert run(capsys, "deriv", "check", str(f))[0] == 2


def test_check_corpus(tmp_path, capsys):
    assert run(capsys, "deriv", "gen", "--seed", "4", "--size", "5", "--out", str(tmp_path))[0] == 0
    files = sorted(tmp_path.glob("taut_*.json"))
    assert files
    for f in files:
        assert run(capsys, "deriv", "check", str(f))[0] == 0


def test_gen_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        run(capsys, "deriv", "gen", "--seed", "9", "--size", "4", "--out", str(d))
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_gen_empty(tmp_path, capsys):
    run(capsys, "deriv", "gen", "--seed", "1", "--size", "0", "--out", str(tmp_path))
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["derivations"] == []


def test_transform_report(tmp_path, capsys):
    src, dst = tmp_path / "in.json", tmp_path / "out.json"
    dump(toy_pipeline_input(2, 1), src)
    code, out, _ = run(capsys, "deriv", "transform", "--op", "pipeline", "--in", str(src), "--out", str(dst),
                       "--params", "m=2", "k=1", "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["bound_before"] == "I+I+w^(0)"
    assert rep["cutrank_after"] == "0"
    assert run(capsys, "deriv", "check", str(dst))[0] == 0


def test_transform_failure_exit(tmp_path, capsys):
    src = tmp_path / "in.json"
    from ordkernel.transform import build_tautology

    dump(build_tautology([], parse_formula("or(mem({},{}),mem({},{{}}))")), src)
    code, _, err = run(capsys, "deriv", "transform", "--op", "invert", "--in", str(src), "--out",
                       str(tmp_path / "o.json"), "--params", "target=mem({},{{{}}})")
    assert code == 2 and "invert" in err


def test_cap_exit(tmp_path, capsys):
    src = tmp_path / "in.json"
    dump(toy_pipeline_input(3, 1), src)
    code, _, err = run(capsys, "deriv", "transform", "--op", "pipeline", "--in", str(src), "--out",
                       str(tmp_path / "o.json"), "--params", "m=3", "k=1")
    assert code == 4 and "cap" in err


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"n": 3}))
    src = tmp_path / "in.json"
    dump(toy_pipeline_input(3, 1, n=3), src)
    code, _, _ = run(capsys, "deriv", "transform", "--config", str(cfg), "--op", "pipeline", "--in", str(src),
                     "--out", str(tmp_path / "o.json"), "--params", "m=3", "k=1")
    assert code == 0


def test_deterministic_output(capsys):
    first = run(capsys, "ord", "stages", "w^(0)", "0", "--size", "3", "--depth", "2")
    assert run(capsys, "ord", "stages", "w^(0)", "0", "--size", "3", "--depth", "2") == first
