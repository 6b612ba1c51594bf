import json
import os
import subprocess
from pathlib import Path

import jsonschema
import pytest

BIN = os.environ.get("SIEVEGAP_BIN", "build/sievegap")
SCHEMAS = Path(os.environ.get("SIEVEGAP_SCHEMAS", Path(__file__).resolve().parents[2] / "schemas"))


def run(*args, env=None, check=True):
    full_env = dict(os.environ)
    full_env.pop("SIEVEGAP_SEED", None)
    full_env.update(env or {})
    p = subprocess.run([BIN, *args], capture_output=True, text=True, env=full_env, timeout=600)
    if check:
        assert p.returncode == 0, p.stderr
    return p


def report(*args, **kw):
    p = run(*args, **kw)
    doc = json.loads(p.stdout)
    schema = json.loads((SCHEMAS / f"{doc['command']}.json").read_text())
    jsonschema.validate(doc, schema)
    return doc


def test_constants():
    doc = report("constants", "--rho", "1")
    assert doc["c_rho"] > 1 / 128
    half = report("constants", "--rho", "0.5", "--derangement", "3")
    assert half["c_rho"] > 1 / 6001
    assert half["derangement"]["rho_d"] == "2/3"


def test_gaps_example():
    doc = report("gaps", "--system", "eratosthenes", "--x", "5", "--window", "1..31")
    assert doc["gap"] == 6
    assert doc["members_count"] == 9
    doc = report("gaps", "--system", "eratosthenes", "--x", "3", "--window", "1..13")
    # 1 -> 5 and 7 -> 11 tie; the leftmost is reported
    assert doc["gap"] == 4
    assert doc["left"] == 1


def test_gaps_with_shift_file(tmp_path):
    shift = tmp_path / "b.txt"
    shift.write_text("# b = 1\n2 1\n3 1\n5 1\n")
    # members of S_5 + 1 are 1 more than members of S_5
    doc = report("gaps", "--system", "eratosthenes", "--x", "5", "--window", "2..32", "--shift-file", str(shift))
    assert doc["gap"] == 6
    assert doc["left"] == 2


def test_usage_errors():
    p = run("gaps", "--x", "5", "--window", "1..31", check=False)
    assert p.returncode == 2
    assert "--system" in p.stderr
    p = run("gaps", "--system", "eratosthenes", "--x", "5", "--window", "1..31", "--bogus", "3", check=False)
    assert p.returncode == 2
    assert "Usage" in p.stdout + p.stderr
    p = run("gaps", "--system", "eratosthenes", "--x", "5", "--window", "31..1", check=False)
    assert p.returncode == 2
    p = run("nonsense", check=False)
    assert p.returncode == 2
    p = run("construct", "--system", "eratosthenes", "--x", "100", "--mode", "greedy", check=False)
    assert p.returncode == 2


def test_domain_error(tmp_path):
    sysfile = tmp_path / "deg.json"
    sysfile.write_text('{"kind": "table", "entries": [[2, [0, 1]]]}')
    p = run("gaps", "--system", str(sysfile), "--x", "2", "--window", "1..10", check=False)
    assert p.returncode == 1
    assert "degenerate" in p.stderr


def test_system_file(tmp_path):
    # n^2 + 1 in the binomial basis: 1 + 1*C(n,1) + 2*C(n,2), trailing comma allowed
    sysfile = tmp_path / "f.json"
    sysfile.write_text('{ "kind": "polynomial", "binomial_coeffs": [1, 1, 2], }')
    a = report("system-info", "--file", str(sysfile), "--x", "100000")
    b = report("system-info", "--system", "poly:n^2+1", "--x", "100000")
    assert a["sigma"] == b["sigma"]
    assert abs(a["rho_share"] - 0.5) <= 0.01
    twin = report("system-info", "--system", "twin", "--x", "10000")
    assert not twin["one_dimensional"]
    assert twin["warnings"]


def test_construct_reproducible_and_thread_independent():
    args = ["construct", "--system", "eratosthenes", "--x", "200", "--trials", "3", "--seed", "11"]
    a = run(*args).stdout
    assert a == run(*args).stdout
    one = json.loads(run(*args, "--threads", "1").stdout)
    four = json.loads(run(*args, "--threads", "4").stdout)
    one["config"].pop("threads")
    four["config"].pop("threads")
    assert one == four
    doc = report(*args)
    assert doc["verified"]
    assert len(doc["trials"]) == 3
    assert doc["L"] == max(t["L"] for t in doc["trials"])


def test_construct_cover_mode_and_shift_out(tmp_path):
    out = tmp_path / "best.txt"
    doc = report("construct", "--system", "eratosthenes", "--x", "1000", "--mode", "cover", "--force-z", "300",
                 "--force-scales", "3", "--shift-out", str(out))
    assert doc["cover"] is not None
    assert doc["params"]["scales"][0]["H"] == 3
    lines = [l for l in out.read_text().splitlines() if l and not l.startswith("#")]
    assert len(lines) == 168  # one residue per prime <= 1000
    # the written shift empties [1, L]
    L = doc["L"]
    gap = report("gaps", "--system", "eratosthenes", "--x", "1000", "--window", f"0..{L + 1}", "--shift-file", str(out))
    assert gap["members_count"] <= 2


def test_seed_sources(tmp_path):
    args = ["construct", "--system", "eratosthenes", "--x", "100"]
    assert report(*args)["config"]["seed"] == 20170601
    assert report(*args, env={"SIEVEGAP_SEED": "5"})["config"]["seed"] == 5
    assert report(*args, "--seed", "9", env={"SIEVEGAP_SEED": "5"})["config"]["seed"] == 9
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"system": "eratosthenes", "x": 150, "seed": 3, "trials": 2}))
    doc = report("--config", str(cfg), "construct", "--x", "120")
    assert doc["config"]["x"] == 120
    assert doc["config"]["seed"] == 3
    assert doc["config"]["trials"] == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"system": "eratosthenes", "x": 100, "colour": "red"}))
    assert run("--config", str(bad), "construct", check=False).returncode == 2


def test_csv_output():
    p = run("gaps", "--system", "eratosthenes", "--x", "5", "--window", "1..31", "--format", "csv")
    head, row = p.stdout.strip().split("\n")
    cols = head.split(",")
    vals = row.split(",")
    assert len(cols) == len(vals)
    assert dict(zip(cols, vals))["gap"] == "6"
    assert "window.lo" in cols
    assert "config.system" in cols


def test_cover_demo():
    doc = report("cover-demo", "--vertices", "2000", "--c2", "4", "--eta", "0.05", "--trials", "10", "--seed", "1")
    assert doc["edges"] == 8000
    assert doc["hypotheses"]["all_pass"]
    assert 0 <= doc["success_rate"] <= 1
    assert run("cover-demo", "--vertices", "2000", "--c2", "4", "--edges", "10", check=False).returncode == 2


def test_moments():
    doc = report("moments", "--system", "eratosthenes", "--identity", "i", "--z", "7", "--y", "50", "--exact")
    assert doc["exact_mean"] == "80/7"
    assert doc["exact_predicted"] == "80/7"
    doc = report("moments", "--system", "eratosthenes", "--identity", "ii-j1", "--trials", "40", "--seed", "2")
    assert doc["instance"]["hm"] == 156
    assert doc["instance"]["Q"]
    assert run("moments", "--system", "eratosthenes", "--identity", "iv", check=False).returncode == 2
    # P(200) is far too large to enumerate
    p = run("moments", "--system", "eratosthenes", "--identity", "i", "--exact", check=False)
    assert p.returncode == 1


def test_composite_runs():
    doc = report("composite-runs", "--poly", "n^2+1", "--X", "10000")
    assert doc["bruteforce"]["start"] == 3537
    assert doc["bruteforce"]["length"] == 87
    doc = report("composite-runs", "--poly", "n^2+1", "--X", "100000", "--constructed", "--seed", "4")
    c = doc["constructed"]
    assert c["within_bruteforce_max"]
    assert c["start"] >= 50000


def test_coprime():
    doc = report("coprime", "--poly", "n", "--k", "17", "--bound", "3000")
    assert doc["search"]["n"] == 2183
    doc = report("coprime", "--poly", "n^2+1", "--constructed", "--xs", "50", "--seeds", "2")
    assert doc["constructed"]["found"]
    assert run("coprime", "--poly", "n", check=False).returncode == 2


@pytest.mark.parametrize("cmd", ["system-info", "gaps", "construct", "cover-demo", "moments", "constants",
                                 "composite-runs", "coprime"])
def test_schema_files_are_valid(cmd):
    jsonschema.Draft202012Validator.check_schema(json.loads((SCHEMAS / f"{cmd}.json").read_text()))
