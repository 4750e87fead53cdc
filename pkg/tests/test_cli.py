import json
import os

import numpy as np
import pytest

from stabeam.cli import main
from stabeam.formats import read_image, read_rf

SMALL = {
    "phantom": {"scatterers": [[0.0, 25e-3, 1.0]]},
    "simulation": {"num_samples": 2048, "noise_std": 0.5, "seed": 12},
    "imaging": {"x_min": -4e-3, "x_max": 4e-3, "z_min": 20e-3, "z_max": 30e-3,
                "nx": 32, "nz": 32},
    "mode": {"name": "sta", "pa": {"num_scanlines": 17}},
}


def make_config(tmp_path, overrides=None, name="run.json"):
    cfg = json.loads(json.dumps(SMALL))
    for key, value in (overrides or {}).items():
        if isinstance(value, dict):
            cfg.setdefault(key, {}).update(value)
        else:
            cfg[key] = value
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_simulate_sta_eight_emissions(tmp_path, capsys):
    cfg = make_config(tmp_path)
    out = tmp_path / "out"
    assert main(["simulate", "--config", cfg, "--out-dir", str(out)]) == 0
    rf = read_rf(out / "rf_sta.starf")
    assert rf.samples.shape == (8, 8, 2048)
    assert "8 emissions" in capsys.readouterr().out
    assert (out / "manifest.json").exists()


def test_simulate_msta_two_emissions(tmp_path):
    cfg = make_config(tmp_path, {"mode": {"name": "msta"}})
    out = tmp_path / "out"
    assert main(["simulate", "--config", cfg, "--out-dir", str(out)]) == 0
    rf = read_rf(out / "rf_msta.starf")
    assert rf.samples.shape[0] == 2  # subaperture 4, stride 4, 8 elements


def test_simulate_empty_phantom_zero_data(tmp_path):
    cfg = make_config(tmp_path, {"phantom": {"scatterers": []},
                                 "simulation": {"noise_std": 0.0, "num_samples": 2048, "seed": 0}})
    out = tmp_path / "out"
    assert main(["simulate", "--config", cfg, "--out-dir", str(out)]) == 0
    rf = read_rf(out / "rf_sta.starf")
    assert np.all(rf.samples == 0.0)


def test_beamform_emits_lris_and_images(tmp_path):
    cfg = make_config(tmp_path)
    out = tmp_path / "out"
    main(["simulate", "--config", cfg, "--out-dir", str(out)])
    rc = main(["beamform", "--config", cfg, "--rf", str(out / "rf_sta.starf"),
               "--out-dir", str(out), "--emit-lri"])
    assert rc == 0
    lris = sorted(p.name for p in out.glob("lri_*.stim"))
    assert len(lris) == 8
    for name in ("hri.stim", "hri_env.stim", "hri_db.stim", "hri.pgm"):
        assert (out / name).exists()
    img, extra = read_image(out / "hri_env.stim")
    assert img.kind == "ENVELOPE"
    assert extra["method"] == "STA"


def test_beamform_pa_rejects_emit_lri(tmp_path, capsys):
    cfg = make_config(tmp_path, {"mode": {"name": "pa"}})
    out = tmp_path / "out"
    main(["simulate", "--config", cfg, "--out-dir", str(out)])
    rc = main(["beamform", "--config", cfg, "--rf", str(out / "rf_pa.starf"),
               "--out-dir", str(out), "--emit-lri"])
    assert rc == 1
    assert "LRI undefined for PA mode" in capsys.readouterr().err


def test_beamform_geometry_mismatch(tmp_path):
    cfg = make_config(tmp_path)
    out = tmp_path / "out"
    main(["simulate", "--config", cfg, "--out-dir", str(out)])
    other = make_config(tmp_path, {"geometry": {"pitch": 0.4e-3}}, name="other.json")
    rc = main(["beamform", "--config", other, "--rf", str(out / "rf_sta.starf"),
               "--out-dir", str(out)])
    assert rc == 1


def test_metrics_single_image(tmp_path):
    cfg = make_config(tmp_path)
    out = tmp_path / "out"
    main(["simulate", "--config", cfg, "--out-dir", str(out)])
    main(["beamform", "--config", cfg, "--rf", str(out / "rf_sta.starf"),
          "--out-dir", str(out)])
    rc = main(["metrics", "--config", cfg, "--out-dir", str(out),
               str(out / "hri_env.stim")])
    assert rc == 0
    lines = (out / "report.csv").read_text().strip().split("\n")
    assert lines[0].startswith("method,")
    assert len(lines) == 2 and lines[1].startswith("STA,")


def test_metrics_rejects_overlapping_regions(tmp_path, capsys):
    overlap = {"metrics": {
        "signal_region": [[-2e-3, 2e-3], [23e-3, 27e-3]],
        "noise_region": [[-2e-3, 2e-3], [26e-3, 29e-3]],
    }}
    cfg = make_config(tmp_path, overlap)
    out = tmp_path / "out"
    main(["simulate", "--config", cfg, "--out-dir", str(out)])
    main(["beamform", "--config", cfg, "--rf", str(out / "rf_sta.starf"),
          "--out-dir", str(out)])
    rc = main(["metrics", "--config", cfg, "--out-dir", str(out),
               str(out / "hri_env.stim")])
    assert rc == 1
    assert "overlap" in capsys.readouterr().err


def test_metrics_rejects_non_envelope_image(tmp_path):
    cfg = make_config(tmp_path)
    out = tmp_path / "out"
    main(["simulate", "--config", cfg, "--out-dir", str(out)])
    main(["beamform", "--config", cfg, "--rf", str(out / "rf_sta.starf"),
          "--out-dir", str(out)])
    rc = main(["metrics", "--config", cfg, "--out-dir", str(out),
               str(out / "hri.stim")])
    assert rc == 1


def test_compare_rows_and_ordering(tmp_path):
    cfg = make_config(tmp_path)
    out = tmp_path / "cmp"
    assert main(["compare", "--config", cfg, "--out-dir", str(out)]) == 0
    lines = (out / "compare.csv").read_text().strip().split("\n")
    assert len(lines) == 4
    methods = [ln.split(",")[0] for ln in lines[1:]]
    assert methods == sorted(methods) == ["MSTA", "PA", "STA"]
    rows = {ln.split(",")[0]: ln.split(",") for ln in lines[1:]}
    assert int(rows["STA"][4]) < int(rows["PA"][4])  # 8 emissions vs 17 lines


def test_compare_is_deterministic(tmp_path):
    cfg = make_config(tmp_path)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["compare", "--config", cfg, "--out-dir", str(a)]) == 0
    assert main(["compare", "--config", cfg, "--out-dir", str(b)]) == 0
    names = ["compare.csv", "manifest.json", "sta/rf_sta.starf", "sta/hri.stim",
             "msta/hri_env.stim", "pa/pa.pgm"]
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_missing_config_is_io_error(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "none.json")]) == 2


def test_bad_config_is_validation_error(tmp_path, capsys):
    cfg = make_config(tmp_path, {"geometry": {"pitch": -1}})
    assert main(["simulate", "--config", cfg]) == 1
    assert "pitch" in capsys.readouterr().err
