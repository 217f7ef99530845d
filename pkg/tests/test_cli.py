import csv
import io
import json
import math
import subprocess
import sys

import pytest

from freelab.cli import (
    DEFAULT_SEED,
    EXIT_PASS,
    EXIT_RESOURCE,
    EXIT_USAGE,
    EXIT_VIOLATION,
    run,
)
from freelab.reports import CSV_COLUMNS


def run_json(argv):
    code, text = run(argv)
    return code, json.loads(text)


def test_moments_catalan():
    code, rep = run_json(["moments", "--m", "0", "2", "4", "6"])
    assert code == EXIT_PASS
    vals = {d["m"]: d["closed_form"] for d in rep["details"]["moments"]}
    assert vals == {0: 1.0, 2: 1.0, 4: 2.0, 6: 5.0}
    assert all(abs(d["quadrature"] - d["closed_form"]) <= 1e-9 for d in rep["details"]["moments"])


def test_moments_quarter():
    code, rep = run_json(["moments", "--law", "quarter", "--radius", "1", "--m", "1"])
    assert code == EXIT_PASS
    assert rep["details"]["moments"][0]["closed_form"] == pytest.approx(4 / (3 * math.pi), abs=1e-15)


@pytest.mark.parametrize("argv", [
    ["moments", "--radius", "-1"],
    ["moments", "--law", "quarter", "--center", "1"],
    ["moments", "--law", "bogus"],
    ["moments", "--m", "-1"],
    ["nosuchcommand"],
    [],
    ["perturb", "--r", "0.6"],
    ["perturb", "--K", "0"],
    ["rmt", "--trials", "0"],
    ["matdist", "--N", "30", "--k", "4"],
])
def test_usage_errors(argv):
    code, text = run(argv)
    assert code == EXIT_USAGE
    assert text.startswith("usage error")


@pytest.mark.parametrize("argv", [
    ["freeness", "--L", "9"],
    ["prop31", "--m-max", "7"],
    ["cor32", "--L", "7"],
    ["rmt", "--n", "8", "--N", "512"],
    ["matdist", "--N", "1024", "--k", "1"],
])
def test_resource_errors(argv):
    code, text = run(argv)
    assert code == EXIT_RESOURCE
    assert text.startswith("resource guard")


def test_freeness_pass():
    code, rep = run_json(["freeness", "--n", "2", "--L", "4"])
    assert code == EXIT_PASS
    assert rep["details"]["all_zero"] and rep["details"]["checked"] > 0


def test_moment_claims_pass():
    code, rep = run_json(["prop31", "--n", "2", "--m-max", "3"])
    assert code == EXIT_PASS
    assert rep["details"]["all_hold"]


def test_entry_freeness_pass():
    code, rep = run_json(["cor32", "--n", "2", "--m", "2", "--L", "3"])
    assert code == EXIT_PASS


def test_perturb_small():
    code, rep = run_json(["perturb", "--r", "0.1", "0.01", "--K", "40", "--N", "16", "--trials", "5"])
    assert code == EXIT_PASS
    assert [d["r"] for d in rep["details"]] == [0.1, 0.01]
    assert rep["warnings"]  # r = 0.1 lies outside the small-r regime


def test_perturb_large_r_warns_but_passes():
    code, rep = run_json(["perturb", "--r", "0.4", "--K", "20", "--N", "16", "--trials", "2"])
    assert code == EXIT_PASS
    assert any("r=0.4" in w for w in rep["warnings"])
    row = [r for r in rep["rows"] if r["stat"].startswith("fprime_l2")][0]
    assert row["pass"] is None


def test_rmt_small():
    code, rep = run_json(["rmt", "--n", "2", "--N", "16", "32", "--trials", "3"])
    assert code == EXIT_PASS
    stats = {r["stat"] for r in rep["rows"]}
    assert {"En_norm_mean", "En_norm_max", "En_norm_mean_decreasing_in_N"} <= stats


def test_matdist_small():
    code, rep = run_json(["matdist", "--N", "32", "--k", "1", "2", "--trials", "2"])
    assert code == EXIT_PASS
    assert [d["k"] for d in rep["details"]] == [1, 2]


def test_fgroup_small():
    code, rep = run_json(["fgroup", "--trials", "10"])
    assert code == EXIT_PASS
    code, rep = run_json(["fgroup", "--trials", "5", "--exact"])
    assert code == EXIT_PASS
    assert all(d["exact_match"] for d in rep["details"])


def test_violation_exit_code():
    # a tiny sample of the matdist distance cannot reach the threshold at k = N
    code, rep = run_json(["matdist", "--N", "8", "--k", "8", "--trials", "1"])
    assert code == EXIT_VIOLATION
    assert rep["pass"] is False


def test_default_seed_recorded():
    _, rep = run_json(["moments", "--m", "2"])
    assert rep["config"]["seed"] == DEFAULT_SEED
    assert all(r["seed"] == DEFAULT_SEED for r in rep["rows"])


@pytest.mark.parametrize("argv", [
    ["moments"],
    ["freeness", "--L", "3"],
    ["prop31", "--m-max", "2"],
    ["cor32", "--L", "2"],
    ["perturb", "--r", "0.05", "--K", "10", "--N", "16", "--trials", "4"],
    ["rmt", "--n", "2", "--N", "16", "--trials", "2", "--mode", "adversarial", "--iterations", "2"],
    ["matdist", "--N", "16", "--k", "2", "--trials", "2"],
    ["fgroup", "--trials", "5"],
])
@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_byte_identical(argv, fmt):
    a = run(argv + ["--seed", "11", "--format", fmt])
    b = run(argv + ["--seed", "11", "--format", fmt])
    assert a == b
    assert a[0] in (EXIT_PASS, EXIT_VIOLATION)


def test_seed_changes_output():
    a = run(["rmt", "--n", "2", "--N", "16", "--trials", "2", "--seed", "1"])[1]
    b = run(["rmt", "--n", "2", "--N", "16", "--trials", "2", "--seed", "2"])[1]
    assert a != b


def test_csv_schema():
    code, text = run(["fgroup", "--trials", "3", "--format", "csv", "--seed", "5"])
    assert code == EXIT_PASS
    lines = text.splitlines()
    assert lines[0] == "# schema=1"
    rows = list(csv.reader(io.StringIO("\n".join(lines[1:]))))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert all(len(r) == len(CSV_COLUMNS) for r in rows)
    body = rows[1:]
    assert body and all(r[4] == "5" for r in body)
    assert {r[8] for r in body} <= {"true", "false", ""}


def test_out_file(tmp_path):
    path = tmp_path / "rep.json"
    code, text = run(["moments", "--m", "2", "--out", str(path)])
    assert code == EXIT_PASS and text == ""
    assert json.loads(path.read_text())["command"] == "moments"


def test_module_entry_point(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "freelab", "moments", "--m", "4"],
        capture_output=True, text=True,
    )
    assert out.returncode == 0
    assert json.loads(out.stdout)["pass"] is True
    bad = subprocess.run([sys.executable, "-m", "freelab", "moments", "--radius", "0"],
                         capture_output=True, text=True)
    assert bad.returncode == EXIT_USAGE
    assert "usage error" in bad.stderr
