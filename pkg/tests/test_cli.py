import argparse
import json
import subprocess
import sys

import pytest

from bsigma import reductions
from bsigma.cli import main, seed_range


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_seed_range():
    assert seed_range("0..100") == range(0, 100)
    assert seed_range("7") == range(7, 8)
    with pytest.raises(argparse.ArgumentTypeError):
        seed_range("a..b")


def test_list_text(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    assert "wr1: RT1_finite_holes -> RT2_2 (" in out
    assert sum(1 for line in out.splitlines() if " -> " in line) == len(reductions.CATALOG)


def test_list_json(capsys):
    code, out, _ = run(capsys, "list", "--json")
    data = json.loads(out)
    assert code == 0 and len(data["reductions"]) == len(reductions.CATALOG)
    for entry in data["reductions"]:
        assert isinstance(entry["name"], str) and isinstance(entry["strong"], bool)


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify", "wr1", "--seeds", "0..4", "--json")
    lines = [json.loads(line) for line in out.splitlines()]
    assert code == 0
    assert [r["seed"] for r in lines[:-1]] == [0, 1, 2, 3]
    assert lines[-1]["passed"] == 4


def test_verify_strong_reports_use_check(capsys):
    code, out, _ = run(capsys, "verify", "finite-union", "--seeds", "0..3")
    assert code == 0 and "use-check: pass" in out


def test_verify_mutation_reports_witnesses(capsys):
    code, out, _ = run(capsys, "verify", "wr1", "--seeds", "0..12", "--mutate", "psi-off-by-one", "--json")
    records = [json.loads(line) for line in out.splitlines()][:-1]
    failed = [r for r in records if r["status"] != "pass"]
    assert code == 1 and failed
    assert all(r["witnesses"] for r in failed)


def test_verify_parallel_matches_serial(capsys):
    _, a, _ = run(capsys, "verify", "srt22", "--seeds", "0..4", "--json")
    _, b, _ = run(capsys, "verify", "srt22", "--seeds", "0..4", "--json", "--jobs", "2")
    assert a == b


def test_verify_unknown(capsys):
    code, _, err = run(capsys, "verify", "nope")
    assert code == 3 and "UnknownReduction" in err


def test_adversary_defeats(capsys, tmp_path):
    out_path = tmp_path / "t.json"
    code, out, _ = run(capsys, "adversary", "nontrivial-rt1", "--candidate", "constant-hole",
                       "--budget", "1000", "--out", str(out_path))
    rec = json.loads(out)
    assert code == 0 and rec["verdict"] == "defeated"
    assert json.loads(out_path.read_text())["verdict"]["status"] == "defeated"


def test_adversary_union(capsys, tmp_path):
    code, out, _ = run(capsys, "adversary", "rt1-vs-union", "--candidate", "naive",
                       "--budget", "10000", "--out", str(tmp_path / "u.json"))
    assert code == 0 and json.loads(out)["verdict"] == "defeated"


def test_adversary_budget_one(capsys, tmp_path):
    code, out, _ = run(capsys, "adversary", "nontrivial-rt1", "--candidate", "first-color",
                       "--budget", "1", "--out", str(tmp_path / "b.json"))
    assert code == 2 and json.loads(out)["verdict"] == "survived-budget"


def test_adversary_malformed_candidate(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"xi": {"start": "q", "states": {"q": {"emit": 1, "next": "z"}}}}))
    code, _, err = run(capsys, "adversary", "nontrivial-rt1", "--candidate", str(bad))
    assert code == 3 and "malformed-candidate" in err


def test_generate(capsys):
    code, out, _ = run(capsys, "generate", "FiniteUnion", "--seed", "1")
    assert code == 0 and json.loads(out)["problem"] == "FiniteUnion"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "bsigma", "list"], capture_output=True, text=True)
    assert res.returncode == 0 and "srt2i" in res.stdout
