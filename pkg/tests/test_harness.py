import json
import math
import os

import numpy as np
import pytest

from gridfr import (ConfigError, ExperimentConfig, ImageGrid, error_maps,
                    preset_config, psnr, run_experiment, run_sweep)
from gridfr.harness import rsweep_config, scene_from_config, sweep_config


def grid(vals):
    vals = np.asarray(vals, dtype=complex)
    return ImageGrid(values=vals, grid_size=vals.shape)


def test_psnr_identical_flagged_infinite():
    g = grid(np.ones((8, 8)))
    assert math.isinf(psnr(g, g))


def test_psnr_formula():
    ref = grid(np.ones((10, 10)))
    rec = grid(np.ones((10, 10)) * 0.9)
    assert psnr(rec, ref) == pytest.approx(20.0, abs=1e-12)


def test_psnr_shape_mismatch():
    with pytest.raises(ConfigError):
        psnr(grid(np.ones(4)), grid(np.ones(5)))


def test_error_map_floor_and_values():
    a = grid(np.ones((4, 4)))
    m = error_maps(a, a)
    assert np.all(m.values.real == -16.0)
    b = grid(np.ones((4, 4)) + 0.01)
    m = error_maps(b, a)
    np.testing.assert_allclose(m.values.real, -2.0, atol=1e-12)
    assert m.values.shape == (4, 4)


def test_config_round_trip():
    cfg = preset_config("noisy-grid", 101)
    back = ExperimentConfig.from_json(cfg.to_json())
    assert back == cfg
    assert back.to_json() == cfg.to_json()


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json("{not json")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"name": "x"})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({**json.loads(preset_config(
            "asterisk", 1).to_json()), "bogus_key": 1})


def test_scene_from_config_kinds():
    assert scene_from_config({"kind": "paper_test_fn"}, 2).kind == "paper_test_fn"
    assert scene_from_config({"kind": "sine"}, 1).dim == 1
    assert scene_from_config({"kind": "boxcar", "npix": 32}, 1).pixels.size == 32
    tp = scene_from_config({"kind": "trig_poly",
                            "coefficients": {"1": [0.0, -0.5],
                                             "-1": [0.0, 0.5]}}, 1)
    assert tp.coefficients[1] == -0.5j
    with pytest.raises(ConfigError):
        scene_from_config({"kind": "nope"}, 1)


def small_config(seed=3):
    return ExperimentConfig(
        name="tiny", dim=1,
        scene={"kind": "sine"},
        raster={"kind": "jittered_grid", "extents": 8, "jitter": 0.25},
        window={"sigma": 0.125, "trunc_eps": 1e-12},
        modes=8, methods=("cg", "frame", "ftcg"), band=3,
        grid_size=64, rtol=None, snr_db=math.inf, seed=seed)


def test_run_experiment_reports():
    reports = run_experiment(small_config())
    assert set(reports) == {"cg", "frame", "ftcg"}
    assert reports["frame"].psnr_db > 40.0
    assert reports["ftcg"].kept_fraction == pytest.approx((5 * 17 - 6) / 17**2)
    for r in reports.values():
        assert r.l2_rel >= 0.0
        assert math.isfinite(r.psnr_vs_scene_db)


def test_run_experiment_artifacts(tmp_path):
    out = tmp_path / "run"
    run_experiment(small_config(), str(out))
    names = sorted(os.listdir(out))
    for expected in ("resolved_config.json", "raster.csv", "samples.csv",
                     "reference.csv", "reference.pgm", "scene.pgm",
                     "recon_cg.csv", "recon_cg.pgm", "recon_frame.csv",
                     "recon_ftcg.csv", "error_frame.pgm", "tmatrix.csv",
                     "tmatrix.pgm", "metrics.csv", "timings.json"):
        assert expected in names
    cfg_back = ExperimentConfig.from_json(
        (out / "resolved_config.json").read_text())
    assert cfg_back == small_config()


def test_run_bit_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_experiment(small_config(), str(a))
    run_experiment(small_config(), str(b))
    assert (a / "metrics.csv").read_bytes() == (b / "metrics.csv").read_bytes()
    assert (a / "samples.csv").read_bytes() == (b / "samples.csv").read_bytes()
    assert (a / "recon_ftcg.csv").read_bytes() == (b / "recon_ftcg.csv").read_bytes()


def test_run_with_noise_deterministic():
    cfg = small_config()
    cfg.snr_db = 20.0
    a = run_experiment(cfg)
    b = run_experiment(cfg)
    assert a["frame"].psnr_db == b["frame"].psnr_db


def test_sweep_table_shape(tmp_path):
    out = tmp_path / "sweep.csv"
    res = run_sweep("N", seeds=(11,), out_path=str(out))
    assert res["values"] == [8, 16, 32, 64]
    assert set(res["table"]) == {"cg", "frame", "ftcg"}
    assert all(len(row) == 4 for row in res["table"].values())
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 5   # comment + header + 3 method rows


def test_sweep_bad_axis():
    with pytest.raises(ConfigError):
        run_sweep("Q")


def test_preset_configs_well_formed():
    for name in ("noisy-grid", "asterisk", "sas-wedge"):
        cfg = preset_config(name, 0)
        assert cfg.dim == 2
        assert cfg.methods == ("cg", "frame", "ftcg")
    with pytest.raises(ConfigError):
        preset_config("nope", 0)
    # sweep point configs resolve too
    assert sweep_config(16, 1).band == math.ceil(math.log(33))
    assert rsweep_config(4, 1).modes == 16
