import csv
import io
import json
import math

import pytest
from click.testing import CliRunner

from surfport.cli import main, parse_angle, parse_grid


@pytest.fixture
def runner():
    return CliRunner()


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_helpers():
    assert math.isclose(parse_angle("pi/4"), math.pi / 4)
    assert math.isclose(parse_angle("0.1pi"), 0.1 * math.pi)
    assert parse_angle("0.3") == 0.3
    assert len(parse_grid("0.08pi:0.14pi:7")) == 7
    assert parse_grid("0.1,0.2") == [0.1, 0.2]


def test_layout(runner):
    res = runner.invoke(main, ["layout", "-d", "3", "--format", "json"])
    assert res.exit_code == 0
    assert sorted(json.loads(res.output)["logical_z"]) == [6, 7, 8]


def test_prep_check(runner):
    res = runner.invoke(main, ["prep-check", "-d", "2,3"])
    assert res.exit_code == 0
    rows = _rows(res.output)
    assert len(rows) == 8 and all(r["ok"] == "1" for r in rows)


def test_oracle_decode_pipeline(runner, tmp_path):
    bits = tmp_path / "bits.txt"
    res = runner.invoke(main, ["oracle", "-d", "2", "--theta", "pi/2", "--t", "0.05pi", "--shots", "200",
                               "--out", str(bits)])
    assert res.exit_code == 0, res.output
    report = json.loads(res.output)
    assert report["twirl_distance"] < 1e-10 and report["deformation_infidelity"] < 1e-8
    res = runner.invoke(main, ["decode", "--input", str(bits), "--decoder", "ml"])
    assert res.exit_code == 0, res.output
    rows = _rows(res.output)
    assert len(rows) == 200
    assert list(rows[0]) == ["shot", "syndrome_weight", "logical_flip", "corrected_bit", "L0", "L1"]


def test_sweep_and_fss(runner, tmp_path):
    table = tmp_path / "sweep.csv"
    plot = tmp_path / "plot.csv"
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"grid": "0.07:0.13:7", "x_kind": "q", "distances": [3, 5, 7],
                               "shots": 3000, "decoder": "mwpm", "seed": 1}))
    res = runner.invoke(main, ["sweep", "--config", str(cfg), "--out", str(table), "--emit-plot-data", str(plot)])
    assert res.exit_code == 0, res.output
    assert len(_rows(table.read_text())) == 21
    assert plot.read_text().startswith("x,y,yerr,series")
    res = runner.invoke(main, ["fss", "--input", str(table), "--variable", "q", "--bootstrap", "20"])
    assert res.exit_code == 0, res.output
    assert 0.07 < json.loads(res.output)["x_c"] < 0.13


def test_sweep_needs_grid(runner):
    res = runner.invoke(main, ["sweep", "-d", "3"])
    assert res.exit_code != 0


def test_renyi_and_bell(runner):
    res = runner.invoke(main, ["renyi", "--L", "4", "--p-grid", "0.5"])
    assert res.exit_code == 0
    assert float(_rows(res.output)[0]["D2"]) == 0.0
    res = runner.invoke(main, ["bell", "-d", "2", "--q", "0", "--shots", "100", "--format", "json"])
    assert res.exit_code == 0
    assert json.loads(res.output)[0]["purity"] == 1.0


def test_mitigate(runner, tmp_path):
    cal = tmp_path / "cal.csv"
    cal.write_text("qubit,m00,m01,m10,m11\n0,1,0,0,1\n1,1,0,0,1\n")
    counts = tmp_path / "counts.json"
    counts.write_text(json.dumps([{"qubits": [0, 1], "counts": [40, 10, 5, 45]}]))
    res = runner.invoke(main, ["mitigate", "--counts", str(counts), "--calibration", str(cal)])
    assert res.exit_code == 0, res.output
    assert math.isclose(float(_rows(res.output)[0]["parity"]), 0.7)


def test_fit_tomo(runner, tmp_path):
    data = tmp_path / "tomo.csv"
    lines = ["theta_L,x,z"]
    for k in range(5):
        a = k * math.pi / 4
        lines.append(f"{a},{0.9 * math.sin(a)},{0.96 * math.cos(a)}")
    data.write_text("\n".join(lines) + "\n")
    res = runner.invoke(main, ["fit-tomo", "--input", str(data)])
    assert res.exit_code == 0, res.output
    doc = json.loads(res.output)
    assert math.isclose(doc["p_Z"], 0.05) and math.isclose(doc["p_X"], 0.02)
