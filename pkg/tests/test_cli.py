import json
import subprocess
import sys

import jsonschema
import pytest

from shearwitt.cli import REPORT_SCHEMA, dumps_report, eval_string, main, parse, run_suite
from shearwitt.errors import ConfigError, LevelMismatch, ParseError
from shearwitt.suites import SuiteConfig, record


@pytest.mark.parametrize("expr,ring,N,shown", [
    ("add (teich 1) (teich 1)", "zmod:2:2", 2, "(2,3)"),
    ("u", "zmod:3:2", 1, "(1)"),
    ("V (teich 1)", "zmod:2:2", 1, "(0,1)"),
    ("sub (F (V (teich 1))) (int 2)", "zmod:2:3", 1, "(0)"),
])
def test_eval_examples(expr, ring, N, shown):
    assert eval_string(expr, ring, N)[0] == shown


def test_eval_vector_literal_roundtrip():
    shown, ser = eval_string("mul [1,2] [3,1]", "zmod:2:2", 2)
    again, _ = eval_string(f"mul {shown.replace('(', '[').replace(')', ']')} [1,0]",
                           "zmod:2:2", 2)
    assert again == shown and ser["level"] == 2


def test_eval_errors():
    with pytest.raises(ParseError):
        parse("add (teich 1)")
    with pytest.raises(ParseError):
        parse("frobnicate 1")
    with pytest.raises(ParseError):
        parse("neg (teich 1))")
    with pytest.raises(LevelMismatch):
        eval_string("add (teich 1) (V (teich 1))", "zmod:2:2", 1)


def test_units_example_passes():
    rep = run_suite(SuiteConfig("units", p=3, m=2, level=2))
    assert rep["summary"]["fail"] == 0
    ids = [r["id"] for r in rep["checks"]]
    assert "units.p3.m2.u-minus-1-in-hatW-iff-p-odd" in ids


def test_models_example_certificates():
    rep = run_suite(SuiteConfig("models", rings=["fpk:2:2"], n=1))
    status = {r["id"]: r["status"] for r in rep["checks"]}
    for name in ("B-to-A", "At-to-A", "B-to-C"):
        assert status[f"models.fpk:2:2.n1.{name}"] == "pass"


def test_level_too_large_is_config_error():
    with pytest.raises(ConfigError, match="LevelTooLarge"):
        run_suite(SuiteConfig("witt-core", level=99))
    assert main(["verify", "witt-core", "--level", "99"]) == 2


def test_bad_ring_and_suite():
    assert main(["verify", "units", "--ring", "nope:3"]) == 2
    assert main(["verify", "nonsense"]) == 2
    assert main(["verify", "units", "--suite", "lau"]) == 2


def test_report_schema_and_determinism(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "quasideal", "--out", str(a), "--seed", "7"]) == 0
    assert main(["verify", "quasideal", "--out", str(b), "--seed", "7"]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert doc["config"]["seed"] == 7
    assert [c["id"] for c in doc["checks"]] == sorted(c["id"] for c in doc["checks"])


def test_seed_changes_samples_not_verdicts():
    r1 = run_suite(SuiteConfig("witt-core", rings=["zmod:2:2"], level=2, samples=50, seed=1))
    r2 = run_suite(SuiteConfig("witt-core", rings=["zmod:2:2"], level=2, samples=50, seed=2))
    assert r1["summary"] == r2["summary"] and r1["summary"]["fail"] == 0


def test_failing_record_carries_witness():
    r = record("x", "y", False, {"n": 3})
    assert r["status"] == "fail" and r["witnesses"]
    doc = {"version": "1", "tool_version": "0", "config": {}, "checks": [r],
           "summary": {"pass": 0, "fail": 1, "skip": 0}}
    jsonschema.validate(json.loads(dumps_report(doc)), REPORT_SCHEMA)
    bad = dict(doc, checks=[dict(r, witnesses=[])])
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(bad, REPORT_SCHEMA)


def test_text_format(capsys):
    assert main(["verify", "q-ops", "--ring", "fpk:2:2", "--format", "text"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[-1].endswith("0 failed, 0 skipped")
    assert all(line.startswith(("PASS", " ")) for line in out.splitlines()[:-1])


def test_cache_commands(tmp_path, monkeypatch, capsys):
    d = tmp_path / "cache"
    assert main(["cache", "verify", "--p", "2", "--cache", str(d)]) == 2
    assert main(["cache", "build", "--p", "3", "--cache", str(d)]) == 0
    monkeypatch.setenv("SHEARWITT_CACHE_DIR", str(d))
    assert main(["cache", "verify", "--p", "3"]) == 0
    assert main(["cache", "show", "--p", "3"]) == 0
    assert "prod" in capsys.readouterr().out
    (d / "witt-poly-p2.json").write_text("not json")
    assert main(["verify", "quasideal"]) == 2


def test_catalog(capsys):
    assert main(["catalog"]) == 0
    assert "zmod:2:3" in capsys.readouterr().out


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "shearwitt", "eval", "V (teich 1)",
                          "--ring", "zmod:2:2"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.splitlines()[0] == "(0,1)"
