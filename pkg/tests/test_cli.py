from __future__ import annotations

import json
import subprocess
import sys

import pytest

from wplstokes.cli import main
from wplstokes.report import VerifyReport, content_hash, emit, load_report, run_verify


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_euler_json_and_text(capsys):
    code, out, _ = run(["euler", "--a", "1,1,1"], capsys)
    data = json.loads(out)
    assert code == 0 and data["schema"] == 1 and data["matrix"] == [[1, 2], [0, 1]]
    code, out, _ = run(["euler", "--a", "1,1,1", "--format", "text"], capsys)
    rows = out.strip().splitlines()[-2:]
    assert [r.split() for r in rows] == [["1", "2"], ["0", "1"]]
    assert len(rows[0]) == len(rows[1])


def test_invalid_input_exit_codes(capsys):
    code, _, err = run(["euler", "--a", "2,3,7"], capsys)
    assert code == 3
    assert json.loads(err)["error"] == "NonPositiveEuler"
    code, _, err = run(["stokes1d", "--a", "2,3,3"], capsys)
    assert code == 3 and json.loads(err)["error"] == "NotReducible"
    with pytest.raises(SystemExit) as info:
        main(["euler", "--a", "1,2"])
    assert info.value.code == 3
    capsys.readouterr()


def test_jacobian_and_critical(capsys):
    code, out, _ = run(["jacobian", "--a", "2,2,2", "--q", "0.7,0.2"], capsys)
    data = json.loads(out)
    assert code == 0 and data["dimension"] == data["mu"] == 5
    code, out, _ = run(["critical", "--a", "1,1,1"], capsys)
    data = json.loads(out)
    assert code == 0 and len(data["values"]) == 2 and data["sector"]["admissible"]


def test_stokes_svg_bundle(tmp_path, capsys):
    out = tmp_path / "bundle"
    code, _, _ = run(["stokes1d", "--a", "1,1,2", "--format", "svg-bundle", "--out", str(out)], capsys)
    assert code == 0
    svg = (out / "critical_values.svg").read_text()
    assert svg.count('class="critical-value"') == 3
    for name in ("thimbles_right.svg", "thimbles_left.svg", "thimbles.json", "stokes.json"):
        assert (out / name).exists()
    S = json.loads((out / "stokes.json").read_text())["S"]
    assert all(S[i][i] == 1 for i in range(3))


def test_lattice_and_mutate(tmp_path, capsys):
    code, out, _ = run(["lattice", "--a", "2,3,4"], capsys)
    data = json.loads(out)
    assert code == 0 and data["det"] == 1 and all(data["checks"].values())
    code, out, _ = run(["mutate", "--matrix", "[[1,-1],[0,1]]", "--moves", "s1"], capsys)
    assert code == 0 and json.loads(out)["after"] == [[1, 1], [0, 1]]
    f = tmp_path / "m.json"
    f.write_text(json.dumps({"S": [[1, 2], [0, 1]]}))
    code, out, _ = run(["mutate", "--matrix", str(f), "--moves", "b1 B1"], capsys)
    assert code == 0 and json.loads(out)["after"] == [[1, 2], [0, 1]]
    code, _, _ = run(["lattice", "--matrix", "[[1,0],[1,1]]"], capsys)
    assert code == 3
    code, _, err = run(["mutate", "--a", "1,1,1", "--moves", "b5"], capsys)
    assert code == 2 and json.loads(err)["error"] == "MoveError"


def test_verify_report_round_trip(tmp_path, capsys):
    path = tmp_path / "r.json"
    code, _, err = run(["verify", "--a", "1,1,1", "--out", str(path)], capsys)
    assert code == 0 and "content hash" in err
    report = load_report(path)
    assert report.passed and report.equivalence["status"] == "found"
    # parse(emit(r)) == r
    again = tmp_path / "again.json"
    emit(report, "json", again)
    assert load_report(again) == report
    assert VerifyReport.from_dict(json.loads(report.to_json())) == report
    # the fixture cache is created next to the output and reused
    cache = list((tmp_path / ".wplstokes-cache").glob("verify-*.json"))
    assert len(cache) == 1
    code, _, _ = run(["verify", "--a", "1,1,1", "--out", str(path)], capsys)
    assert code == 0 and load_report(path) == report


def test_verify_hash_is_deterministic():
    r1 = run_verify((1, 1, 2), 1.0, 0)
    r2 = run_verify((1, 1, 2), 1.0, 0)
    assert content_hash(r1) == content_hash(r2)
    assert content_hash(r1) != content_hash(run_verify((1, 1, 1), 1.0, 0))


def test_verify_all_orders_at_least_two(tmp_path, capsys):
    code, out, _ = run(["verify", "--a", "2,2,2", "--format", "text", "--no-cache"], capsys)
    assert code == 0 and "equivalence: skipped" in out
    bundle = tmp_path / "b"
    code, _, _ = run(["verify", "--a", "2,2,3", "--format", "svg-bundle", "--out", str(bundle)], capsys)
    assert code == 0 and (bundle / "report.json").exists() and (bundle / "critical_values.svg").exists()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "wplstokes", "euler", "--a", "2,2,2"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["matrix"][0] == [1, 1, 1, 1, 2]
