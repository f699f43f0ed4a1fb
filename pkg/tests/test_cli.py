import json

import pytest

from scdim import cli
from scdim.cli import InputError, RunConfig, execute_command, main
from scdim.concepts import F5, dumps_class


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_certify_f5_file(tmp_path, capsys):
    path = tmp_path / "f5.json"
    path.write_text(dumps_class(F5()))
    code, out = run(capsys, "certify", "--class", str(path))
    assert code == 0 and out.out.strip() == "SCdim = 2, LR = 3 (extremal, ≠ cube)"


def test_analyze_cube(capsys):
    code, out = run(capsys, "analyze", "--gen", "cube:3")
    assert code == 0 and out.out.strip() == "VC = 3, extremal, SCdim = 2, LR = 3"


def test_analyze_non_extremal(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text('{"domain": ["a", "b"], "concepts": ["++", "--"]}')
    code, out = run(capsys, "analyze", "--class", str(path), "--out", str(tmp_path / "a.json"))
    assert code == 0 and out.out.strip() == "VC = 1, not extremal"
    doc = json.loads((tmp_path / "a.json").read_text())
    assert doc["shattered"] == [[], [0], [1]] and doc["strongly_shattered"] == [[]]


def test_learn_thresholds(tmp_path, capsys):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["learn", "--gen", "thresholds:5", "--eps", "1/20", "--delta", "1/20", "--seed", "42"]
    code, out = run(capsys, *argv, "--out", str(out1))
    assert code == 0 and out.out.startswith("max list")
    doc = json.loads(out1.read_text())
    assert doc["aggregate"]["max_list_size"] <= 2 and doc["aggregate"]["ok"]
    assert run(capsys, *argv, "--out", str(out2))[0] == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_complex_exports(tmp_path, capsys):
    o = tmp_path / "d.json"
    assert run(capsys, "complex", "--gen", "f5", "--depth", "1", "--out", str(o))[0] == 0
    assert len(json.loads(o.read_text())["vertices"]) == 21
    assert run(capsys, "complex", "--gen", "f5", "--kind", "cubical", "--out", str(o))[0] == 0
    assert len(json.loads(o.read_text())["cubes"]) == 11
    assert run(capsys, "complex", "--gen", "f5", "--depth", "0", "--format", "off", "--out", str(o))[0] == 0
    assert o.read_text().startswith("OFF")


def test_cover_and_retract(capsys):
    code, out = run(capsys, "cover", "--gen", "f5")
    assert code == 0 and "order 2" in out.out
    code, out = run(capsys, "retract", "--gen", "thresholds:4", "--samples", "100")
    assert code == 0 and "passed" in out.out


def test_verify(capsys):
    code, out = run(capsys, "verify", "--gen", "thresholds:4", "--samples", "200")
    assert code == 0 and out.out.strip() == "all checks passed"


@pytest.mark.parametrize("argv", [
    ["analyze", "--gen", "spheres:2"],
    ["learn", "--gen", "f5", "--eps", "0.1"],
    ["learn", "--gen", "f5", "--eps", "-1/2"],
    ["analyze", "--class", "/nonexistent/file.json"],
    ["analyze"],
])
def test_input_errors(argv, capsys):
    assert run(capsys, *argv)[0] == 2


def test_pipeline_failure(monkeypatch, capsys):
    from scdim import collapse, retraction
    stuck = collapse.CollapseSequence((), False, frozenset(), 0)
    monkeypatch.setattr(retraction, "collapse_search", lambda *a, **k: stuck)
    assert run(capsys, "retract", "--gen", "f5")[0] == 3


def test_config_validation():
    with pytest.raises(InputError):
        RunConfig("learn", "f5", False, trials=0)
