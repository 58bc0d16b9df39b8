from __future__ import annotations

import pytest

from dml import corpus
from dml.cli import main, run

CORPUS = {name: str(corpus.__path__[0]) + "/" + name for name in corpus.FILES}


def kv(result):
    return dict(result.machine)


@pytest.fixture
def bad_file(tmp_path):
    path = tmp_path / "bad.dml"
    path.write_text("spec A class { method m() }\nspec A class {}\n", encoding="utf-8")
    return str(path)


@pytest.fixture
def broken_file(tmp_path):
    path = tmp_path / "broken.dml"
    path.write_text("spec X clazz {}\n", encoding="utf-8")
    return str(path)


def test_validate_ok():
    r = run(["validate", CORPUS["linbox_copy.dml"], "--format", "kv"])
    assert r.exit_code == 0
    assert kv(r)["status"] == "ok"
    assert (kv(r)["specs"], kv(r)["morphisms"], kv(r)["pushouts"]) == ("11", "15", "4")
    assert r.report.endswith("exit_code=0\n")


def test_missing_file_is_a_usage_error():
    r = run(["validate", "/nonexistent/x.dml"])
    assert r.exit_code == 2
    assert kv(r)["error.kind"] == "file-not-found"


def test_bad_arguments_are_usage_errors():
    assert run([]).exit_code == 2
    assert run(["frobnicate"]).exit_code == 2
    assert run(["verify", CORPUS["virtual_inheritance.dml"]]).exit_code == 2
    assert run(["validate", CORPUS["virtual_inheritance.dml"], "--depth", "0"]).exit_code == 2
    assert run(["pushout", CORPUS["virtual_inheritance.dml"], "--span", "X,f1", "--vertex", "P"]).exit_code == 2


def test_help_exits_cleanly():
    r = run(["--help"])
    assert r.exit_code == 0 and "validate" in r.report


def test_parse_errors_exit_two(broken_file):
    r = run(["validate", broken_file, "--format", "kv"])
    assert r.exit_code == 2
    assert (kv(r)["error.kind"], kv(r)["error.line"], kv(r)["error.column"]) == ("ParseError", "1", "8")


def test_validation_failures_exit_one(bad_file):
    r = run(["validate", bad_file, "--format", "kv"])
    assert r.exit_code == 1
    assert kv(r)["status"] == "invalid"
    assert kv(r)["violation.0"].startswith("duplicate-spec")


def test_verify_reports_the_certificate():
    r = run(["verify", CORPUS["virtual_inheritance.dml"], "--cone", "diamond", "--format", "kv"])
    assert r.exit_code == 0
    m = kv(r)
    assert m["cone.commutes"] == "true"
    assert m["square.paths_equal"] == "equal"
    assert (m["certificate.kind"], m["certificate.holds"]) == ("isomorphism", "true")


def test_verify_decomposes_the_archetype_leg():
    r = run(["verify", CORPUS["linbox_copy.dml"], "--cone", "archetype_cone", "--format", "kv"])
    m = kv(r)
    assert m["decomposition.arch_inst.parallel"] == "abs_to_E2"
    assert m["decomposition.arch_inst.count"] == "3"
    text = run(["verify", CORPUS["linbox_copy.dml"], "--cone", "archetype_cone"]).report
    assert "composed of three morphisms of different nature" in text


def test_verify_unknown_cone():
    r = run(["verify", CORPUS["virtual_inheritance.dml"], "--cone", "nope"])
    assert r.exit_code == 1


def test_classify():
    r = run(["classify", CORPUS["template.dml"], "--pushout", "tpp", "--format", "kv"])
    assert r.exit_code == 0
    assert kv(r)["pattern.tag"] == "template-parameter-passing"
    assert kv(r)["pattern.generic"] == "T"


def test_pushout_command():
    r = run(["pushout", CORPUS["virtual_inheritance.dml"], "--span", "X,f1,f2", "--vertex", "P", "--format", "kv"])
    assert r.exit_code == 0
    text = run(["pushout", CORPUS["virtual_inheritance.dml"], "--span", "X,f1,f2", "--vertex", "P"]).report
    assert "m0 (method) <- Y1.m0, Y2.m0" in text
    taken = run(["pushout", CORPUS["virtual_inheritance.dml"], "--span", "X,f1,f2", "--vertex", "Z"])
    assert taken.exit_code == 1


def test_skeleton_writes_files(tmp_path):
    out = tmp_path / "out"
    r = run(["skeleton", CORPUS["linbox_copy.dml"], "--out", str(out)])
    assert r.exit_code == 0
    names = sorted(p.name for p in out.iterdir())
    assert any(n.startswith("main") for n in names)
    assert "Zp F2(2);" in next(p for p in out.iterdir() if p.name.startswith("main")).read_text()


def test_skeleton_strict_fails(tmp_path):
    r = run(["skeleton", CORPUS["template.dml"], "--dialect", "interface", "--strict", "--out", str(tmp_path)])
    assert r.exit_code == 1
    assert kv(r)["error.kind"] == "UnsupportedConstruct"


def test_dot_to_stdout_and_file(tmp_path):
    r = run(["dot", CORPUS["virtual_inheritance.dml"]])
    assert r.exit_code == 0 and r.report.startswith("digraph")
    target = tmp_path / "d.dot"
    assert run(["dot", CORPUS["virtual_inheritance.dml"], "--out", str(target)]).exit_code == 0
    assert target.read_text().startswith("digraph")


@pytest.mark.parametrize("name", sorted(corpus.DEMOS))
def test_demos_run(name, tmp_path):
    r = run(["demo", name, "--out", str(tmp_path)])
    assert r.exit_code == 0, r.report


def test_color_follows_the_environment(monkeypatch, bad_file):
    monkeypatch.setenv("DML_COLOR", "1")
    assert "\x1b[" in run(["validate", bad_file]).report
    monkeypatch.setenv("DML_COLOR", "0")
    assert "\x1b[" not in run(["validate", bad_file]).report
    assert "\x1b[" not in run(["validate", bad_file], color=False).report


def test_main_uses_stderr_only_for_usage_errors(capsys, bad_file):
    assert main(["validate", CORPUS["virtual_inheritance.dml"]]) == 0
    out, err = capsys.readouterr()
    assert out and not err
    assert main(["validate", bad_file]) == 1
    out, err = capsys.readouterr()
    assert out and not err
    assert main(["validate", "/nonexistent/x.dml"]) == 2
    out, err = capsys.readouterr()
    assert err and not out
