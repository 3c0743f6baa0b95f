import json
import math
import subprocess
import sys

import numpy as np
import pytest

from lmisophote.cli import main

LAT = ["--surface", "hyperboloid", "--axis-kind", "timelike", "--d", "1,0,0", "--theta", "1"]


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture(scope="module")
def fixtures_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("fx")
    assert main(["fixtures", "--output-dir", str(d)]) == 0
    return d


def test_fixtures_written(fixtures_dir):
    names = sorted(p.name for p in fixtures_dir.iterdir())
    assert names == ["expected.json", "hyperboloid.json", "hyperboloid_expr.json",
                     "latitude.csv", "meridian.csv"]
    exp = json.loads((fixtures_dir / "expected.json").read_text())
    assert exp["latitude"]["psi"] == pytest.approx(1 / math.tanh(1))
    assert exp["meridian"]["expect"] == "NotAnIsophote"


def test_check_surface(capsys, fixtures_dir):
    code, out, _ = run(["check-surface", "--surface", "hyperboloid"], capsys)
    assert code == 0 and json.loads(out)["report"]["passed"] is True
    code, out, _ = run(["check-surface", "--surface", str(fixtures_dir / "hyperboloid_expr.json")], capsys)
    assert code == 0
    bad = '{"kind": "expr", "components": "2*u, u, v", "domain": [-1, 1, -1, 1]}'  # timelike plane
    code, out, _ = run(["check-surface", "--surface", bad], capsys)
    assert code == 3


def test_extract_latitude(capsys, tmp_path):
    code, out, _ = run(["extract", *LAT, "--grid-n", "64", "--n-out", "128"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert len(doc["paths"]) == 1 and doc["closed"] == [True]
    uv = np.asarray(doc["paths"][0])
    assert np.abs(uv[:, 0] - 1).max() <= 1e-6
    assert doc["level"] == pytest.approx(-math.cosh(1))


def test_extract_is_deterministic(capsys):
    argv = ["extract", *LAT, "--grid-n", "48", "--n-out", "64"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert a == b


def test_extract_side_outputs(capsys, tmp_path):
    svg, csv = tmp_path / "c.svg", tmp_path / "trace"
    code, _, _ = run(["extract", *LAT, "--grid-n", "48", "--n-out", "64",
                      "--svg", str(svg), "--csv", str(csv), "-o", str(tmp_path / "p.json")], capsys)
    assert code == 0
    assert svg.read_text().lstrip().startswith("<svg") and "<polyline" in svg.read_text()
    lines = (tmp_path / "trace_0.csv").read_text().splitlines()
    assert lines[0] == "s,x1,x2,x3" and len(lines) == 65


def test_extract_empty_level_reports_range(capsys, caplog):
    code, out, err = run(["extract", "--surface", "hyperboloid", "--axis-kind", "timelike",
                          "--d", "1,0,0", "--theta", "5", "--grid-n", "32"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["paths"] == [] and "field_range" in doc
    assert any(r.levelname == "WARNING" for r in caplog.records)


@pytest.mark.parametrize("argv, code", [
    (["extract", *LAT[:-1], "0"], 2),                      # theta = 0 on a timelike axis
    (["extract", "--surface", "hyperboloid", "--axis-kind", "timelike", "--d", "0,1,0",
      "--theta", "1"], 2),                                  # axis of the wrong causal type
    (["extract", "--surface", "no_such_surface", *LAT[2:]], 2),
    (["extract", "--surface", '{"kind": "expr", "components": "u, v, (u", "domain": [0, 1, 0, 1]}', *LAT[2:]], 2),
    (["extract", "--surface", "hyperboloid"], 1),           # missing axis
    (["bogus"], 1),
    (["axis", "--surface", "hyperboloid"], 1),              # neither --input nor --curve
])
def test_exit_codes(capsys, argv, code):
    try:
        got = main(argv)
    except SystemExit as exc:
        got = exc.code
    capsys.readouterr()
    assert got == code


def test_axis_round_trip(capsys, tmp_path):
    poly = tmp_path / "p.json"
    assert run(["extract", *LAT, "--grid-n", "64", "--n-out", "256", "-o", str(poly)], capsys)[0] == 0
    code, out, _ = run(["axis", "--input", str(poly), "--surface", "hyperboloid"], capsys)
    assert code == 0
    rep = json.loads(out)["reports"][0]
    assert np.linalg.norm(np.asarray(rep["d_mean"]) - [1, 0, 0]) <= 1e-4
    assert rep["theta_hat"] == pytest.approx(1.0, abs=1e-3)
    assert rep["verify_axis_constant"] is True and rep["gauss_image"]["passed"]
    code, out, _ = run(["axis", "--input", str(poly), "--surface", "hyperboloid", "--verbose",
                          "--n-out", "256"], capsys)
    assert len(json.loads(out)["reports"][0]["d_samples"]) == 256


def test_axis_spacelike_round_trip(capsys, tmp_path):
    poly = tmp_path / "p.json"
    argv = ["extract", "--surface", "hyperboloid", "--axis-kind", "spacelike", "--d", "0,1,0",
            "--theta", "0.5", "--grid-n", "64", "--n-out", "256", "-o", str(poly)]
    assert run(argv, capsys)[0] == 0
    code, out, _ = run(["axis", "--input", str(poly), "--surface", "hyperboloid"], capsys)
    assert code == 0
    for rep in json.loads(out)["reports"]:
        assert rep["kind"] == "spacelike"
        assert np.linalg.norm(np.asarray(rep["d_mean"]) - [0, 1, 0]) <= 1e-3


def test_axis_from_csv(capsys, fixtures_dir):
    code, out, _ = run(["axis", "--curve", str(fixtures_dir / "latitude.csv"), "--closed",
                        "--surface", "hyperboloid", "--axis-kind", "timelike"], capsys)
    assert code == 0
    rep = json.loads(out)["reports"][0]
    assert abs(rep["mean_constancy_function"]) == pytest.approx(1 / math.tanh(1), abs=1e-5)


def test_meridian_is_not_an_isophote(capsys, fixtures_dir):
    code, out, _ = run(["axis", "--curve", str(fixtures_dir / "meridian.csv"),
                        "--surface", "hyperboloid", "--axis-kind", "timelike"], capsys)
    assert code == 4
    rep = json.loads(out)["reports"][0]
    assert rep["error"] == "InfeasibleAngle"  # psi is identically zero on a meridian


def test_analyze_writes_darboux_csv(capsys, fixtures_dir, tmp_path):
    csv = tmp_path / "dx.csv"
    code, out, _ = run(["analyze", "--curve", str(fixtures_dir / "latitude.csv"), "--closed",
                        "--surface", "hyperboloid", "--axis-kind", "timelike",
                        "--darboux-csv", str(csv)], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc is not None
    rows = csv.read_text().splitlines()
    header = rows[0].split(",")
    assert {"s", "k_n", "k_g", "tau_g"} <= set(header)
    kg = np.array([float(r.split(",")[header.index("k_g")]) for r in rows[1:]])
    assert np.abs(np.abs(kg) - 1 / math.tanh(1)).max() <= 1e-5


def test_console_script_module_entry(tmp_path):
    res = subprocess.run([sys.executable, "-m", "lmisophote.cli", "check-surface", "--surface",
                          "hyperboloid", "--grid-n", "16"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["report"]["passed"] is True
