import json
import subprocess
import sys
from pathlib import Path

import pytest

from galelab.cli import main

SPECS = Path(__file__).resolve().parent.parent / "specs"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write_spec(tmp_path, doc, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps({"schema": "galelab.experiment/v1", **doc}))
    return path


def test_validate_exit_codes(capsys):
    code, out, _ = run(capsys, "validate", "--spec", SPECS / "trivial.json")
    assert code == 0 and out.startswith("VALID")
    assert run(capsys, "validate", "--spec", SPECS / "block_validate.json")[0] == 0
    code, out, _ = run(capsys, "validate", "--spec", SPECS / "corrupted_table.json")
    assert code == 1 and out.startswith("INVALID") and "w='1'" in out


def test_validate_without_gale_is_config_error(capsys):
    code, _, err = run(capsys, "validate", "--spec", SPECS / "minbranch_trace.json")
    assert code == 2 and "gale" in err


def test_bad_spec_and_usage_errors(capsys, tmp_path):
    bad = write_spec(tmp_path, {"gale": {"rule": "trivial", "q": 2.0}})
    assert run(capsys, "validate", "--spec", bad)[0] == 2
    assert run(capsys, "validate", "--spec", tmp_path / "absent.json")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["estimate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["estimate", "--spec", str(SPECS / "estimate_freq.json"), "--precision", "0.1.2"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_trace_is_byte_stable(capsys, tmp_path):
    a = run(capsys, "trace", "--spec", SPECS / "minbranch_trace.json")
    b = run(capsys, "trace", "--spec", SPECS / "minbranch_trace.json")
    assert a == b and a[0] == 0
    rows = a[1].splitlines()
    assert rows[0].startswith("n,") and len(rows) == 22
    code, _, _ = run(capsys, "trace", "--spec", SPECS / "trivial.json", "--depth", "6", "--out", tmp_path)
    assert code == 0 and len((tmp_path / "trace.csv").read_text().splitlines()) == 8


def test_trace_past_the_constructor_range_is_runtime_error(capsys, tmp_path):
    spec = write_spec(
        tmp_path,
        {"constructor": {"constructor": "circuit", "gale": {"rule": "trivial", "q": "3/2"}, "params": {"alpha": "1/2", "n_max": 2}}},
    )
    code, _, err = run(capsys, "trace", "--spec", spec, "--depth", "20")
    assert code == 3 and "census" in err


def test_estimate_writes_report_and_probes(capsys, tmp_path):
    code, _, _ = run(capsys, "estimate", "--spec", SPECS / "estimate_zeros.json", "--out", tmp_path)
    assert code == 0
    report = (tmp_path / "estimate.txt").read_text()
    assert report.startswith("method: threshold-search") and "bracket: [" in report
    probes = (tmp_path / "probes.csv").read_text().splitlines()
    assert probes[0] == "q,s_lo,s_hi,succeeded,first_crossing_depth" and len(probes) > 5
    first = (tmp_path / "estimate.txt").read_bytes()
    run(capsys, "estimate", "--spec", SPECS / "estimate_zeros.json", "--out", tmp_path)
    assert (tmp_path / "estimate.txt").read_bytes() == first


def test_estimate_with_no_success_is_runtime_error(capsys, tmp_path):
    spec = write_spec(
        tmp_path,
        {"family": {"rule": "singleton", "params": {"target": {"kind": "rule", "rule": "ones"}}}, "source": {"kind": "rule", "rule": "zeros"}},
    )
    code, _, err = run(capsys, "estimate", "--spec", spec, "--depth", "200")
    assert code == 3 and "succeeded" in err


def test_estimate_flag_overrides_are_checked(capsys):
    code, _, _ = run(capsys, "estimate", "--spec", SPECS / "estimate_zeros.json", "--depth", "0")
    assert code == 2


def test_circuits_census_csv(capsys):
    code, out, err = run(capsys, "circuits", "--n", "1", "--t-max", "3")
    assert code == 0
    rows = [r.split(",") for r in out.splitlines()]
    assert rows[0] == ["t", "N", "bound_check", "margin_log2"]
    counts = {int(r[0]): int(r[1]) for r in rows[1:]}
    assert counts[0] == 3 and counts[1] == 4 and counts[3] == 4
    assert "saturation_point: 1" in err and "bound_check: pass" in err


def test_circuits_to_directory(capsys, tmp_path):
    code, out, _ = run(capsys, "circuits", "--n", "2", "--out", tmp_path)
    assert code == 0 and out == ""
    rows = (tmp_path / "census_n2.csv").read_text().splitlines()[1:6]
    assert [r.split(",")[1] for r in rows] == ["4", "8", "14", "14", "16"]
    assert "tables_reached: 16 of 16" in (tmp_path / "census_n2.txt").read_text()


def test_circuits_rejects_large_n(capsys):
    code, _, err = run(capsys, "circuits", "--n", "4")
    assert code == 2 and "n must lie" in err


def test_properties_small_run(capsys):
    code, out, _ = run(capsys, "properties", "--seed", "1", "--tables", "2", "--covers", "5")
    assert code == 0
    lines = out.splitlines()
    assert [line.split()[:2] for line in lines] == [
        ["PASS", "kraft:"],
        ["PASS", "exceeders:"],
        ["PASS", "slack:"],
        ["PASS", "cover-triple:"],
    ]


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "galelab", "validate", "--spec", str(SPECS / "trivial.json")],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0 and res.stdout.startswith("VALID")
