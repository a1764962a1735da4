from __future__ import annotations

import argparse
import csv
import io
import json
import math

import numpy as np
import pytest

from heatloc import export
from heatloc.cli import main, parse_list, parse_number
from heatloc.discretization import rasterize
from heatloc.geometry import PRESETS, DomainSpec, build_domain, unit_square
from heatloc.spectral_heat import HeatParams, ScalarField, concentration_field


def read_csv(path):
    return list(csv.reader(io.StringIO(path.read_text())))


@pytest.mark.parametrize("text, value", [("1/64", 1 / 64), ("pi/2", math.pi / 2), ("2*pi/3", 2 * math.pi / 3), ("-0.5", -0.5), ("1e-3", 1e-3)])
def test_parse_number(text, value):
    assert parse_number(text) == pytest.approx(value)


@pytest.mark.parametrize("text", ["", "pi**2", "__import__('os')", "1/0", "x"])
def test_parse_number_rejects(text):
    with pytest.raises(argparse.ArgumentTypeError):
        parse_number(text)


def test_parse_list():
    assert parse_list("pi/2, pi/4") == pytest.approx([math.pi / 2, math.pi / 4])


@pytest.mark.parametrize("preset", sorted(PRESETS))
def test_polygon_csv_roundtrip(preset):
    dom = build_domain(PRESETS[preset])
    back = export.read_polygon_csv(export.polygon_csv(dom))
    assert back.same_vertices(dom)


@pytest.mark.parametrize("preset", sorted(PRESETS))
def test_build_presets(tmp_path, preset):
    assert main(["build", "--preset", preset, "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "polygon.csv")
    assert rows[0] == ["ring_id", "vertex_index", "x", "y"]
    assert DomainSpec.from_json((tmp_path / "spec.json").read_text()) == PRESETS[preset]
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["command"] == "build"
    assert set(man["files"]) == {"polygon.csv", "spec.json", "manifest.json"}
    assert {"numpy", "scipy", "numba", "shapely", "heatloc"} <= set(man["versions"])


def test_build_slit_has_two_holes(tmp_path):
    spec = tmp_path / "slit.json"
    spec.write_text(PRESETS["slit_box"].to_json())
    assert main(["build", "--spec", str(spec), "--out", str(tmp_path / "o")]) == 0
    rings = {int(r[0]) for r in read_csv(tmp_path / "o" / "polygon.csv")[1:]}
    assert rings == {0, 1, 2}


def test_malformed_json_writes_nothing(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    out = tmp_path / "out"
    assert main(["build", "--spec", str(bad), "--out", str(out)]) == 2
    assert not out.exists()
    assert "error" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["build", "--preset", "nope"],
        ["concentrate", "--preset", "square", "--h", "1/8"],
        ["walk", "--preset", "square", "--t", "-1"],
        ["spectrum", "--preset", "square", "--h", "1/4", "--K", "17"],
        ["experiment", "cone", "--angles", "4"],
        ["spectrum", "--h", "1/8", "--spec", "a.json", "--preset", "square"],
    ],
)
def test_invalid_input_exit_code(tmp_path, argv):
    assert main(argv + ["--out", str(tmp_path / "o")]) == 2
    assert not (tmp_path / "o").exists()


def test_unknown_subcommand():
    assert main(["frobnicate"]) == 2


def test_spectrum_outputs(tmp_path):
    assert main(["spectrum", "--preset", "square", "--h", "1/16", "--K", "24", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "mu.csv")
    assert rows[0] == ["k", "mu", "residual"]
    mu = np.array([float(r[1]) for r in rows[1:]])
    assert len(mu) == 24 and mu[0] == 0.0
    assert mu[1] == pytest.approx(math.pi**2, rel=5e-3)
    weyl = json.loads((tmp_path / "weyl.json").read_text())
    assert weyl["predicted_slope"] == pytest.approx(4 * math.pi)
    for k in range(8):
        assert (tmp_path / f"phi_{k}.csv").exists()
    assert not (tmp_path / "phi_8.csv").exists()


def test_spectrum_few_modes_skips_weyl(tmp_path):
    assert main(["spectrum", "--h", "1/8", "--K", "5", "--out", str(tmp_path)]) == 0
    assert "skipped" in json.loads((tmp_path / "weyl.json").read_text())


def test_concentrate_large_time_uniform(tmp_path):
    assert main(["concentrate", "--h", "1/16", "--t", "1000", "--x", "0.5,0.5", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "Q.csv")
    assert rows[0] == ["i", "j", "x", "y", "value"]
    vals = np.array([float(r[4]) for r in rows[1:]])
    np.testing.assert_allclose(vals, 1.0, atol=1e-10)
    side = json.loads((tmp_path / "Q.json").read_text())
    assert side["t"] == 1000 and side["mass"] == pytest.approx(1.0)
    p = np.array([float(r[4]) for r in read_csv(tmp_path / "p_row.csv")[1:]])
    assert p.min() >= 0


def test_walk_is_reproducible(tmp_path):
    args = ["walk", "--h", "1/16", "--t", "0.01", "--n-pairs", "5000", "--seed", "7"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--threads", "1", "--out", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "estimate.json").read_bytes()
    assert a == (tmp_path / "b" / "estimate.json").read_bytes()
    doc = json.loads(a)
    assert doc["n_pairs"] == 5000 and doc["seed"] == 7


def test_experiment_cone_cli(tmp_path):
    argv = ["experiment", "cone", "--angles", "pi/2,pi/3,pi/4", "--h", "1/40", "--out", str(tmp_path)]
    assert main(argv) == 0
    rows = read_csv(tmp_path / "table.csv")
    assert rows[0][:4] == ["parameter", "measured", "predicted", "ratio"]
    pred = sorted(float(r[2]) for r in rows[1:])
    assert pred == pytest.approx([4.0, 6.0, 8.0])
    assert json.loads((tmp_path / "report.json").read_text())["name"] == "cone"
    runs = [p for p in tmp_path.iterdir() if p.is_dir()]
    assert len(runs) == 3
    assert {"spec.json", "mask.json", "mu.csv", "Q.csv", "Q.json"} <= {p.name for p in runs[0].iterdir()}


def test_field_csv_clipping():
    mask = rasterize(unit_square(), 0.5)
    f = ScalarField(np.array([-1.0, 0.5, 2.0, 0.0]), mask.cell_area, mask)
    raw = [float(r[4]) for r in list(csv.reader(io.StringIO(export.field_csv(f, mask))))[1:]]
    clipped = [float(r[4]) for r in list(csv.reader(io.StringIO(export.field_csv(f, mask, True))))[1:]]
    assert raw == [-1.0, 0.5, 2.0, 0.0]
    assert clipped == [0.0, 0.5, 2.0, 0.0]


def test_sidecar_fields(square16):
    mask, _, dense = square16
    f = concentration_field(dense.truncated(10), HeatParams(0.1))
    doc = json.loads(export.field_sidecar(f))
    assert set(doc) == {"t", "K_used", "tail_bound", "mass"}
    assert doc["K_used"] == 10


def test_to_json_handles_numpy():
    doc = json.loads(export.to_json({"b": np.float64(1.5), "a": np.arange(3), "c": float("nan")}))
    assert doc == {"a": [0, 1, 2], "b": 1.5, "c": None}


def test_write_bundle_leaves_no_staging(tmp_path):
    files = {"a.txt": "x", "sub/b.txt": "y"}
    export.write_bundle(tmp_path, files)
    assert (tmp_path / "sub" / "b.txt").read_text() == "y"
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".stage")]
