import json
import math
import os

import numpy as np
import pytest

from gridfr.cli import main


def test_gen_raster_and_sample_and_reconstruct(tmp_path):
    raster = tmp_path / "r.csv"
    samples = tmp_path / "s.csv"
    out = tmp_path / "out"
    assert main(["gen-raster", "--kind", "jittered", "--extents", "8",
                 "--jitter", "0.25", "--seed", "5",
                 "--out", str(raster)]) == 0
    assert raster.exists()
    assert main(["sample", "--raster", str(raster), "--scene", "sine",
                 "--out", str(samples)]) == 0
    assert main(["reconstruct", "--raster", str(raster),
                 "--samples", str(samples), "--method", "ftcg",
                 "--band", "3", "--modes", "8", "--grid", "64",
                 "--out", str(out)]) == 0
    assert (out / "recon_ftcg.csv").exists()
    assert (out / "recon_ftcg.pgm").exists()


def test_metrics_command(tmp_path, capsys):
    raster = tmp_path / "r.csv"
    samples = tmp_path / "s.csv"
    out = tmp_path / "out"
    main(["gen-raster", "--kind", "jittered", "--extents", "8",
          "--seed", "5", "--out", str(raster)])
    main(["sample", "--raster", str(raster), "--scene", "sine",
          "--out", str(samples)])
    main(["reconstruct", "--raster", str(raster), "--samples", str(samples),
          "--method", "frame", "--modes", "8", "--grid", "64",
          "--out", str(out)])
    rc = main(["metrics", "--recon", str(out / "recon_frame.csv"),
               "--reference", str(out / "recon_frame.csv"),
               "--error-map", str(tmp_path / "e.pgm")])
    assert rc == 0
    assert "psnr_db=inf" in capsys.readouterr().out
    assert (tmp_path / "e.pgm").exists()


def test_gen_asterisk_and_wedge(tmp_path):
    a = tmp_path / "a.csv"
    w = tmp_path / "w.csv"
    assert main(["gen-raster", "--kind", "asterisk", "--spokes", "4",
                 "--radial-count", "3", "--max-radius", "3",
                 "--out", str(a)]) == 0
    assert main(["gen-raster", "--kind", "sas-wedge", "--k-count", "6",
                 "--ku-count", "5", "--rescale-to", "4", "4",
                 "--out", str(w)]) == 0
    assert sum(1 for _ in open(a)) == 1 + 2 * 4 * 3 + 1
    assert sum(1 for _ in open(w)) == 1 + 30


def test_run_config_file(tmp_path):
    cfg = {
        "name": "tiny", "dim": 1,
        "scene": {"kind": "sine"},
        "raster": {"kind": "jittered_grid", "extents": 8, "jitter": 0.25},
        "window": {"sigma": 0.125, "trunc_eps": 1e-12},
        "modes": 8, "methods": ["frame"], "band": 3,
        "grid_size": 64, "rtol": None, "snr_db": "inf", "seed": 4,
        "quad_nodes": None,
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "run"
    assert main(["run", "--config", str(path), "--out", str(out)]) == 0
    assert (out / "metrics.csv").exists()


def test_run_requires_preset_or_config():
    assert main(["run"]) == 2


def test_config_error_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"name\": \"x\"}")
    assert main(["run", "--config", str(bad)]) == 2


def test_missing_file_exit_code(tmp_path):
    assert main(["sample", "--raster", str(tmp_path / "none.csv"),
                 "--scene", "sine", "--out", str(tmp_path / "s.csv")]) == 2


def test_bad_raster_format_exit_code(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("# gridfr-raster v1, dim=1, kind=custom, seed=none\nnan\n")
    assert main(["sample", "--raster", str(bad), "--scene", "sine",
                 "--out", str(tmp_path / "s.csv")]) == 2


def test_sweep_command(tmp_path, capsys):
    out = tmp_path / "sw"
    os.makedirs(out)
    rc = main(["sweep", "--axis", "r", "--seed", "11", "--out", str(out)])
    assert rc == 0
    assert (out / "sweep_r.csv").exists()
    assert "ftcg" in capsys.readouterr().out
