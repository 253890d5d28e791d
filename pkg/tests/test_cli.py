from __future__ import annotations

import json
from pathlib import Path

import pytest

from csys.cli import EXIT_FAIL, EXIT_INPUT, EXIT_PASS, main

GOLDEN = Path(__file__).parent / "fixtures" / "cc_bg2_depth2.json"


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["generate", "bg", "--out", "bg.json", "--universe", "bgu.json"]) == EXIT_PASS
    assert main(["generate", "bg", "--out", "bg.json", "--universe", "bgu2.json", "--tops", '{"e": "g", "g": "g"}']) == EXIT_PASS
    return tmp_path


def report(path: str) -> dict:
    return json.loads(Path(path).read_text())


def test_generate_kinds(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["generate", "term", "--out", "t.json", "--universe", "tu.json"]) == EXIT_PASS
    assert main(["generate", "lattice", "--k", "2", "--out", "b2.json", "--universe", "b2u.json"]) == EXIT_PASS
    assert main(["generate", "finsets-skeleton", "--out", "fs.json", "--universe", "fsu.json"]) == EXIT_PASS
    assert main(["generate", "bg", "--order", "3", "--out", "bg3.json"]) == EXIT_PASS
    assert len(report("b2.json")["objects"]) == 4
    assert len(report("bg3.json")["morphisms"]) == 3


def test_validate_and_enumerate(workdir):
    assert main(["validate", "--category", "bg.json", "--universe", "bgu.json", "--enumerate", "e", "--out", "v.json"]) == EXIT_PASS
    r = report("v.json")
    assert r["passed"] and r["results"]["universe structures"] == 4
    assert r["inputs"]["category"]["path"] == "bg.json"
    assert len(r["inputs"]["category"]["sha256"]) == 64


def test_build_matches_golden_file(workdir):
    assert main(["build", "--category", "bg.json", "--universe", "bgu.json", "--depth", "2", "--out", "cc.json", "--report", "b.json"]) == EXIT_PASS
    assert report("cc.json") == json.loads(GOLDEN.read_text())
    assert report("b.json")["results"]["level sizes"] == [1, 2, 4]
    assert main(["check", "--cc", "cc.json", "--out", "c.json"]) == EXIT_PASS
    assert report("c.json")["passed"]


def test_check_from_category(workdir):
    assert main(["check", "--category", "bg.json", "--universe", "bgu.json", "--depth", "3", "--out", "c.json"]) == EXIT_PASS
    assert report("c.json")["results"]["level sizes"] == [1, 2, 4, 8]


def test_functor_between_structures(workdir):
    Path("phi.json").write_text(json.dumps({"objects": {"pt": "pt"}, "morphisms": {"e": "e", "g": "g"}, "phi": "e", "phi_tilde": "e", "psi": "e"}))
    args = ["functor", "--source-cat", "bg.json", "--source-uni", "bgu.json", "--target-cat", "bg.json", "--target-uni", "bgu2.json"]
    assert main([*args, "--phi", "phi.json", "--depth", "3", "--out", "f.json"]) == EXIT_PASS
    assert report("f.json")["results"]["classification"]["kind"] == "isomorphism"
    Path("bad.json").write_text(json.dumps({"objects": {"pt": "pt"}, "morphisms": {"e": "e", "g": "g"}, "phi": "e", "phi_tilde": "g", "psi": "e"}))
    assert main([*args, "--phi", "bad.json", "--depth", "2", "--out", "f2.json"]) == EXIT_FAIL
    bad = report("f2.json")
    assert bad["failures"] > 0
    assert bad["checks"]["universe functor"]["violations"][0]["check"] == "3 universe square"
    Path("missing.json").write_text(json.dumps({"objects": {"pt": "pt"}, "morphisms": {"e": "e", "g": "g"}}))
    assert main([*args, "--phi", "missing.json", "--depth", "2"]) == EXIT_INPUT


@pytest.mark.parametrize("method", ["presheaf", "tower"])
def test_reconstruct(workdir, method):
    assert main(["reconstruct", "--category", "bg.json", "--universe", "bgu.json", "--method", method, "--depth", "1", "--out", "r.json"]) == EXIT_PASS
    r = report("r.json")
    assert r["passed"] and r["results"]["classification"]["kind"] == "isomorphism"


def test_reconstruct_needs_headroom(workdir, capsys):
    assert main(["build", "--category", "bg.json", "--universe", "bgu.json", "--depth", "2", "--out", "cc.json", "--report", "b.json"]) == EXIT_PASS
    assert main(["reconstruct", "--cc", "cc.json", "--depth", "1"]) == EXIT_INPUT
    assert "depth at least 3" in capsys.readouterr().err


def test_reconstruct_without_inputs(workdir, capsys):
    assert main(["reconstruct", "--depth", "1"]) == EXIT_INPUT
    assert "--cc" in capsys.readouterr().err


def test_precat(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["generate", "lattice", "--k", "2", "--out", "b2.json"]) == EXIT_PASS
    assert main(["precat", "--category", "b2.json", "--auto-fp", "--depth", "1", "--out", "p.json"]) == EXIT_PASS
    r = report("p.json")
    assert r["results"]["U_C sizes"] == {"bot": 9, "{0}": 6, "{1}": 6, "top": 4}
    assert r["results"]["CC level sizes"] == [1, 4]


def test_precat_without_final_object(workdir, capsys):
    assert main(["precat", "--category", "bg.json", "--auto-fp", "--depth", "1"]) == EXIT_INPUT
    assert "no final object" in capsys.readouterr().err


def test_corrupted_universe_square(workdir):
    data = report("bgu.json")
    # a projection that breaks commutativity of the canonical square over g
    data["squares"]["g"]["proj"] = "e"
    Path("broken.json").write_text(json.dumps(data))
    assert main(["validate", "--category", "bg.json", "--universe", "broken.json", "--out", "v.json"]) == EXIT_FAIL
    r = report("v.json")
    assert not r["passed"]
    checks = {v["check"] for v in r["checks"]["universe laws"]["violations"]}
    assert "canonical square commutes" in checks
    assert any(v["instance"] == "g" for v in r["checks"]["universe laws"]["violations"])


def test_malformed_json(workdir, capsys):
    Path("bad.json").write_text('{"objects": ["pt"],\n  "morphisms": [,]}')
    assert main(["validate", "--category", "bad.json"]) == EXIT_INPUT
    err = capsys.readouterr().err
    assert "line 2, column" in err


def test_missing_file(workdir, capsys):
    assert main(["validate", "--category", "nowhere.json"]) == EXIT_INPUT
    assert "nowhere.json" in capsys.readouterr().err


def test_dangling_reference(workdir, capsys):
    data = report("bg.json")
    data["morphisms"][1]["cod"] = "ghost"
    Path("dangling.json").write_text(json.dumps(data))
    assert main(["validate", "--category", "dangling.json"]) == EXIT_INPUT
    assert "dangling" in capsys.readouterr().err


def test_budget_exceeded(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert main(["generate", "finsets-skeleton", "--out", "fs.json", "--universe", "fsu.json"]) == EXIT_PASS
    code = main(["reconstruct", "--category", "fs.json", "--universe", "fsu.json", "--method", "tower", "--depth", "1", "--budget", "4"])
    assert code == EXIT_INPUT
    assert "budget of 4" in capsys.readouterr().err
