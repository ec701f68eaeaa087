import json
import subprocess
import sys
from pathlib import Path

import pytest

from adelic.cli import main

SCEN = Path(__file__).resolve().parent.parent / "scenarios"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


@pytest.mark.parametrize("group,cmd,name,code", [
    ("verify", "pullback", "hasse-z", 0),
    ("verify", "pullback", "corrupted-hasse", 2),
    ("verify", "pullback", "kxy-chain", 3),
    ("verify", "bp-equivalence", "bp-z5", 0),
    ("cube", "check-law", "kxy-chain", 0),
    ("cube", "check-law", "kxy-corrupt", 2),
    ("cube", "build", "hasse-z", 0),
    ("functor", "gamma", "local-z2", 0),
    ("functor", "support", "support-z6", 0),
    ("functor", "cosupport", "cosupport-z2", 0),
    ("module", "cocartesian", "remark85", 0),
    ("module", "roundtrip", "remark85", 2),
    ("module", "roundtrip", "roundtrip-z", 0),
    ("module", "reconstruct", "roundtrip-z4", 0),
])
def test_exit_codes(capsys, group, cmd, name, code):
    got, out = run(capsys, group, cmd, SCEN / f"{name}.json")
    assert got == code
    json.loads(out)


def test_remark_witness(capsys):
    _, out = run(capsys, "module", "roundtrip", SCEN / "remark85.json")
    assert json.loads(out)["report"]["witness"] == "(Z/5, 0, Z/5)"


def test_unknown_field_reports_line(tmp_path, capsys):
    text = (SCEN / "hasse-z.json").read_text().splitlines()
    text.insert(3, '  "colour": "blue",')
    p = tmp_path / "bad.json"
    p.write_text("\n".join(text))
    code, out = run(capsys, "verify", "pullback", p)
    err = json.loads(out)
    assert code == 1 and err["error"] == "ScenarioError"
    assert err["field"] == "colour" and err["line"] == 4


def test_invalid_json_reports_line(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text('{\n  "schema": "adelic-scenario/1",\n  oops\n}')
    code, out = run(capsys, "verify", "pullback", p)
    assert code == 1 and json.loads(out)["line"] == 3


def test_missing_poset(capsys, tmp_path):
    p = tmp_path / "noposet.json"
    p.write_text(json.dumps({"schema": "adelic-scenario/1", "ring": {"kind": "Integers"}}))
    code, out = run(capsys, "verify", "pullback", p)
    assert code == 1 and json.loads(out)["field"] == "poset"


def test_poset_override(capsys):
    code, out = run(capsys, "--poset-primes", "(0);(7)", "verify", "pullback", SCEN / "hasse-z.json")
    assert code == 0
    assert [t["test"] for t in json.loads(out)["report"]["tests"]] == ["K(7)", "L(0)"]


def test_text_format(capsys):
    code, out = run(capsys, "--format", "text", "verify", "pullback", SCEN / "hasse-z.json")
    assert code == 0 and "verdict: Pullback" in out


def test_byte_stable_subprocess():
    cmd = [sys.executable, "-m", "adelic", "verify", "pullback", str(SCEN / "kxy-chain.json")]
    a = subprocess.run(cmd, capture_output=True)
    b = subprocess.run(cmd, capture_output=True)
    assert a.returncode == b.returncode == 3
    assert a.stdout == b.stdout and a.stdout
