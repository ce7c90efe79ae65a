import json
import math
import subprocess
import sys

import numpy as np
import pytest

from solgeom.cli import TRAJECTORY_HEADER, emit_trajectory, run
from solgeom.flow import integrate, spec_from_initial
from solgeom.group import ORIGIN


def _run(capsysbinary, *argv):
    code = run(list(argv))
    out, err = capsysbinary.readouterr()
    return code, out, err


def _csv(data):
    lines = data.decode().strip().split("\n")
    return lines[0].split(","), [l.split(",") for l in lines[1:]]


def test_invariants_at_zero(capsysbinary):
    code, out, _ = _run(capsysbinary, "invariants", "--k", "0")
    header, rows = _csv(out)
    row = dict(zip(header, rows[0]))
    assert code == 0
    assert float(row["T"]) == pytest.approx(math.sqrt(2) * math.pi, abs=1e-12)
    assert float(row["H"]) == pytest.approx(math.pi, abs=1e-12)


def test_geodesic_periods(capsysbinary):
    code, out, _ = _run(capsysbinary, "geodesic", "--k", "0.6", "--h", "0", "--periods", "2", "--dt", "0.01", "--format", "csv")
    header, rows = _csv(out)
    assert code == 0
    assert ",".join(header) == TRAJECTORY_HEADER
    z = [float(r[3]) for r in rows]
    assert abs(z[0] - z[-1]) <= 1e-8


def test_distance_closed_form(capsysbinary):
    code, out, _ = _run(capsysbinary, "distance", "--from", "0,0,0", "--to", "3,0,0")
    header, rows = _csv(out)
    assert code == 0
    assert float(dict(zip(header, rows[0]))["distance"]) == pytest.approx(2 * math.asinh(1.5), rel=1e-15)


def test_vertical_trajectory_rows():
    traj = integrate(spec_from_initial(ORIGIN, (0, 0, 1)), 0.0, 1.0, num=3)
    lines = emit_trajectory(traj, "csv").decode().splitlines()
    assert lines[0] == "t,x,y,z,zdot,res_speed,res_grayson"
    vals = [list(map(float, l.split(",")))[:5] for l in lines[1:]]
    assert vals == [[0, 0, 0, 0, 1], [0.5, 0, 0, 0.5, 1], [1, 0, 0, 1, 1]]


def test_json_round_trip():
    from solgeom.flow import spec_from_kh

    traj = integrate(spec_from_kh(0.7, 0.2, 0.1), 0.0, 5.0, num=33)
    doc = json.loads(emit_trajectory(traj, "json"))
    assert list(doc["meta"]) == ["a", "b", "c", "k", "h", "class", "tol"]
    assert doc["meta"]["class"] == "generic"
    cols = TRAJECTORY_HEADER.split(",")
    assert list(doc["samples"][0]) == cols
    got = np.array([[s[c] for c in cols] for s in doc["samples"]])
    want = np.column_stack([traj.t, traj.states, traj.res_speed, traj.res_grayson])
    assert np.array_equal(got, want)


def test_csv_round_trip():
    from solgeom.flow import spec_from_kh

    traj = integrate(spec_from_kh(0.3, -0.4, 0.2), 0.0, 3.0, num=17)
    _, rows = _csv(emit_trajectory(traj, "csv"))
    got = np.array(rows, dtype=float)
    want = np.column_stack([traj.t, traj.states, traj.res_speed, traj.res_grayson])
    assert np.array_equal(got, want)


ARGVS = [
    ["geodesic", "--k", "0.6", "--periods", "1", "--num", "50", "--format", "csv"],
    ["geodesic", "--k", "0.6", "--periods", "1", "--num", "50", "--format", "json"],
    ["geodesic", "--point", "0,0,0", "--velocity", "0.6,0,0.8", "--duration", "2", "--format", "json"],
    ["invariants", "--k-grid", "0,0.9,10", "--format", "json"],
    ["partner", "--k", "0.6", "--t1", "0.7"],
    ["distance", "--from", "0,0,0", "--to", "1,2,0.5", "--format", "json"],
    ["sphere", "--radius", "1", "--n-polar", "3", "--n-azimuth", "4"],
    ["asymptotic", "--theta", "0.7", "--lambdas", "100,1000"],
    ["nil", "--velocity", "0.6,0,0.8", "--t1", "3", "--format", "json"],
]


@pytest.mark.parametrize("argv", ARGVS, ids=[a[0] + "-" + a[-1] for a in ARGVS])
def test_deterministic_output(capsysbinary, argv):
    c1, o1, _ = _run(capsysbinary, *argv)
    c2, o2, _ = _run(capsysbinary, *argv)
    assert c1 == c2 == 0
    assert o1 == o2 and len(o1) > 0


def test_output_file(tmp_path, capsysbinary):
    path = tmp_path / "traj.csv"
    code, out, _ = _run(capsysbinary, "geodesic", "--k", "0.5", "--duration", "1", "--num", "5", "-o", str(path))
    assert code == 0 and out == b""
    assert path.read_text().startswith(TRAJECTORY_HEADER + "\n")


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        [],
        ["distance", "--from", "0,0", "--to", "1,1,1"],
        ["invariants", "--k", "2"],
        ["geodesic", "--k", "0.5"],
        ["geodesic", "--k", "0.5", "--periods", "1", "--tol", "1e-3"],
        ["nil", "--velocity", "1,1,1", "--t1", "1"],
        ["asymptotic", "--theta", "0.7", "--lambdas", "1"],
    ],
)
def test_usage_errors(capsysbinary, argv):
    code, out, err = _run(capsysbinary, *argv)
    assert code == 2
    assert out == b"" and len(err) > 0


def test_write_failure(capsysbinary, tmp_path):
    code, _, err = _run(capsysbinary, "invariants", "--k", "0.5", "-o", str(tmp_path / "missing" / "x.csv"))
    assert code == 3 and b"cannot write" in err


def test_solver_failure_exit_code(capsysbinary, monkeypatch):
    import importlib

    dist_mod = importlib.import_module("solgeom.distance")
    monkeypatch.setattr(dist_mod, "_refine", lambda *a, **k: None)
    code, out, err = _run(capsysbinary, "distance", "--from", "0,0,0", "--to", "1,1,1")
    assert code == 3 and out == b""


def test_module_entry_point_is_byte_identical():
    argv = [sys.executable, "-m", "solgeom", "geodesic", "--k", "0.6", "--periods", "1", "--dt", "0.05"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b
    assert a.split(b"\n", 1)[0] == TRAJECTORY_HEADER.encode()
