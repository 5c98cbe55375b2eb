import json
import math
import os
from pathlib import Path

import pytest

import gsclab

PATTERNS = Path(os.environ.get("GSC_PATTERNS", Path(__file__).resolve().parents[2] / "patterns"))


def test_standard_carpet_counts():
    sc = gsclab.Pattern.standard_carpet()
    assert (sc.dim, sc.scale, sc.mass) == (2, 3, 8)
    assert sc.removed() == [[1, 1]]
    assert gsclab.cell_count(sc, 2) == 64
    d = gsclab.dims(sc)
    assert d["m_I"] == 3
    assert d["d_I"] == pytest.approx(1.0)
    assert d["d_f"] == pytest.approx(math.log(8) / math.log(3))


def test_pattern_round_trip_and_hash():
    sc = gsclab.Pattern.standard_carpet()
    again = gsclab.Pattern.parse(sc.format())
    assert again == sc
    assert again.hash() == sc.hash()
    assert len(sc.hash()) == 64
    assert gsclab.Pattern.load(str(PATTERNS / "standard_sc.cfg")) == sc


def test_validation_names_failing_axiom():
    assert gsclab.validate(gsclab.Pattern.standard_carpet())["valid"]
    corners = gsclab.Pattern.load(str(PATTERNS / "corners_only.cfg"))
    report = gsclab.validate(corners)
    assert not report["valid"]
    assert report["first_failure"] == "Connectedness"


def test_full_square_resistance_is_one():
    full = gsclab.Pattern.full_cube(2, 3)
    for m_prime in (1, 2, 3):
        assert gsclab.raw_resistance(full, 1, m_prime) == pytest.approx(1.0, rel=1e-8)


def test_hand_reduced_carpet_network():
    sc = gsclab.Pattern.standard_carpet()
    assert gsclab.raw_resistance(sc, 1, 1, mode="cell") == pytest.approx(1.0, abs=1e-10)
    assert gsclab.raw_resistance(sc, 1, 1) == pytest.approx(5.0 / 7.0, rel=1e-10)


def test_resistance_series_and_exit_times():
    sc = gsclab.Pattern.standard_carpet()
    s = gsclab.resistance_series(sc, 3, 1)
    assert s["complete"] and len(s["entries"]) == 3
    assert 1.0 < s["rho_hat"] < 1.6
    e = gsclab.exit_series(sc, 2, 1, s["rho_hat"])
    assert e["complete"] and all(a > 0 for a in e["a"])


def test_prescribed_averages():
    sc = gsclab.Pattern.standard_carpet()
    n_faces = gsclab.face_count(sc, 1, 1)
    assert n_faces == 72
    targets = [math.sin(1.0 + f) for f in range(n_faces)]
    out = gsclab.prescribe_averages(sc, 1, 1, targets, 4)
    assert len(out["achieved"]) == n_faces
    worst = max(abs(a - t) for a, t in zip(out["achieved"], targets))
    assert worst == pytest.approx(out["quadrature_error"])
    with pytest.raises(ValueError):
        gsclab.prescribe_averages(sc, 1, 1, targets[:-1], 4)


def test_run_writes_csv_and_manifest(tmp_path):
    config = {
        "pattern": str(PATTERNS / "standard_sc.cfg"),
        "output": str(tmp_path),
        "resist": {"nmax": 2, "extra": 1},
    }
    assert gsclab.run("resist", json.dumps(config)) == 0
    lines = (tmp_path / "resist.csv").read_text().splitlines()
    assert lines[0] == f"# gsclab {gsclab.__version__} resist"
    assert len(lines) == 4
    manifest = json.loads((tmp_path / "resist.manifest.json").read_text())
    assert manifest["complete"] is True
    assert manifest["estimates"]["rho_hat"] > 1.0


def test_unknown_config_key_is_rejected():
    with pytest.raises(ValueError):
        gsclab.run("resist", json.dumps({"resist": {"nmax": 2, "bogus": 1}}))
