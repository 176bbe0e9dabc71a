import os
import struct

import numpy as np
import pytest
import yaml

from lsnn import (AdamState, Checkpoint, CheckpointError, ConfigError,
                  build_network, default_config, load_checkpoint, load_config,
                  save_checkpoint, validate_config)
from lsnn.checkpoint import FORMAT_VERSION, MAGIC
from lsnn.cli import main
from lsnn.config import apply_overrides
from lsnn.datasets import (DatasetError, downsample_images, load_csv_dataset,
                           load_dataset, load_idx, normalize_gray, resize_images)
from lsnn.exports import (MetricsWriter, export_raster, export_readout,
                          export_trajectories, read_metrics)


# ---------------------------------------------------------------------------
# config

def test_default_configs_validate():
    for task in ("seq-pixel", "l2l-sinus", "l2l-tn", "meta-rl", "meta-rl-smoke"):
        cfg = validate_config({"task": task})
        assert cfg["task"] == task


def test_unknown_keys_rejected_recursively():
    with pytest.raises(ConfigError) as exc:
        validate_config({"task": "meta-rl", "ppo": {"bogus": 1, "clip_eps": 0.1},
                         "nonsense": True})
    msgs = "\n".join(exc.value.errors)
    assert "ppo.bogus" in msgs and "nonsense" in msgs


def test_physics_range_checks():
    with pytest.raises(ConfigError, match="clip_eps"):
        validate_config({"task": "meta-rl", "ppo": {"clip_eps": 1.0}})
    with pytest.raises(ConfigError, match="connectivity"):
        validate_config({"task": "seq-pixel", "network": {"connectivity": 1.5}})
    with pytest.raises(ConfigError, match="tau_a"):
        validate_config({"task": "seq-pixel", "network": {"tau_a": -5.0}})
    with pytest.raises(ConfigError, match="gamma"):
        validate_config({"task": "l2l-sinus", "training": {"gamma": -0.1}})


def test_overrides():
    cfg = validate_config({"task": "meta-rl"})
    out = apply_overrides(cfg, ["ppo.clip_eps=0.1", "training.iterations=7"])
    assert out["ppo"]["clip_eps"] == 0.1
    assert out["training"]["iterations"] == 7
    with pytest.raises(ConfigError):
        apply_overrides(cfg, ["nope.nope=1"])
    with pytest.raises(ConfigError):
        apply_overrides(cfg, ["badformat"])
    with pytest.raises(ConfigError):
        apply_overrides(cfg, ["ppo.discount=0"])  # re-validated


def test_load_config_yaml(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("task: l2l-sinus\nseed: 5\ntraining:\n  iterations: 3\n")
    cfg = load_config(str(p))
    assert cfg["seed"] == 5 and cfg["training"]["iterations"] == 3
    assert cfg["training"]["batch"] == 10  # defaults filled in


# ---------------------------------------------------------------------------
# checkpoint

def make_checkpoint(rng):
    params = build_network(rng, n_in=5, n_regular=6, n_adaptive=3, n_out=2,
                           connectivity=0.4, dale=True, delay_range=(0, 2),
                           noise_sigma=0.05)
    adam = AdamState.init(params.trainable(), amsgrad=True)
    adam.m["w_in"] += rng.standard_normal(params.w_in.shape)
    adam.step = 17
    return Checkpoint(params=params, adam=adam, iteration=42,
                      rng_state=rng.bit_generator.state)


def test_checkpoint_roundtrip_byte_identical(tmp_path):
    rng = np.random.default_rng(0)
    ckpt = make_checkpoint(rng)
    p1, p2 = str(tmp_path / "a.bin"), str(tmp_path / "b.bin")
    save_checkpoint(p1, ckpt)
    loaded = load_checkpoint(p1)
    save_checkpoint(p2, loaded)
    assert open(p1, "rb").read() == open(p2, "rb").read()
    np.testing.assert_array_equal(loaded.params.w_rec, ckpt.params.w_rec)
    np.testing.assert_array_equal(loaded.params.mask_rec, ckpt.params.mask_rec)
    np.testing.assert_array_equal(loaded.params.signs_rec, ckpt.params.signs_rec)
    np.testing.assert_array_equal(loaded.adam.m["w_in"], ckpt.adam.m["w_in"])
    assert loaded.adam.step == 17 and loaded.iteration == 42
    assert loaded.rng_state == ckpt.rng_state


def test_checkpoint_corruption_detected(tmp_path):
    rng = np.random.default_rng(1)
    p = str(tmp_path / "c.bin")
    save_checkpoint(p, make_checkpoint(rng))
    data = bytearray(open(p, "rb").read())
    data[len(data) // 2] ^= 0xFF
    open(p, "wb").write(bytes(data))
    with pytest.raises(CheckpointError, match="checksum"):
        load_checkpoint(p)
    # truncation is also a checksum failure
    open(p, "wb").write(bytes(data[:-40]))
    with pytest.raises(CheckpointError):
        load_checkpoint(p)


def test_checkpoint_version_refusal(tmp_path):
    rng = np.random.default_rng(2)
    p = str(tmp_path / "v.bin")
    save_checkpoint(p, make_checkpoint(rng))
    data = bytearray(open(p, "rb").read())
    body = data[:-32]
    body[8:12] = struct.pack("<I", FORMAT_VERSION + 1)
    import hashlib
    open(p, "wb").write(bytes(body) + hashlib.sha256(bytes(body)).digest())
    with pytest.raises(CheckpointError, match="version"):
        load_checkpoint(p)


# ---------------------------------------------------------------------------
# datasets

def write_idx_fixture(tmp_path):
    images = np.arange(4 * 4 * 4, dtype=np.uint8).reshape(4, 4, 4) * 4
    labels = np.array([3, 1, 4, 1], dtype=np.uint8)
    ip = tmp_path / "img.idx"
    lp = tmp_path / "lab.idx"
    with open(ip, "wb") as f:
        f.write(struct.pack(">HBB", 0, 0x08, 3))
        f.write(struct.pack(">3I", 4, 4, 4))
        f.write(images.tobytes())
    with open(lp, "wb") as f:
        f.write(struct.pack(">HBB", 0, 0x08, 1))
        f.write(struct.pack(">I", 4))
        f.write(labels.tobytes())
    return str(ip), str(lp), images, labels


def test_idx_roundtrip(tmp_path):
    ip, lp, images, labels = write_idx_fixture(tmp_path)
    np.testing.assert_array_equal(load_idx(ip), images)
    imgs, labs = load_dataset(ip, "idx", labels_path=lp)
    assert imgs.shape == (4, 16)
    assert imgs.max() <= 1.0 and imgs.min() >= 0.0
    np.testing.assert_array_equal(labs, labels)


def test_idx_malformed(tmp_path):
    p = tmp_path / "bad.idx"
    p.write_bytes(b"\x00\x00\x99\x01")
    with pytest.raises(DatasetError, match="magic"):
        load_idx(str(p))
    p.write_bytes(b"")
    with pytest.raises(DatasetError):
        load_idx(str(p))


def test_csv_dataset(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("1,0,128,255,0\n7,10,20,30,40\n")
    images, labels = load_csv_dataset(str(p))
    assert images.shape == (2, 4)
    np.testing.assert_array_equal(labels, [1, 7])
    p.write_text("1,2\n3,4,5\n")
    with pytest.raises(DatasetError, match=":2"):
        load_csv_dataset(str(p))
    p.write_text("")
    with pytest.raises(DatasetError, match="empty"):
        load_csv_dataset(str(p))


def test_downsample_and_resize():
    rng = np.random.default_rng(3)
    imgs = rng.random((2, 28 * 28))
    small = downsample_images(imgs, 2)
    assert small.shape == (2, 14 * 14)
    block = imgs[0].reshape(28, 28)[:2, :2].mean()
    assert small[0, 0] == pytest.approx(block)
    resized = resize_images(imgs, 14)
    assert resized.shape == (2, 196)
    np.testing.assert_allclose(resize_images(imgs, 28), imgs)
    with pytest.raises(DatasetError):
        downsample_images(np.zeros((1, 10)), 2)


def test_normalize_gray():
    np.testing.assert_allclose(normalize_gray(np.array([0.0, 127.5, 255.0])),
                               [0.0, 0.5, 1.0])
    np.testing.assert_allclose(normalize_gray(np.array([0.25, 0.5])), [0.25, 0.5])


# ---------------------------------------------------------------------------
# exports

def test_metrics_append_only(tmp_path):
    p = str(tmp_path / "m.csv")
    with MetricsWriter(p) as m:
        m.append(iteration=0, loss=1.5, mse=0.1, rate_reg=2.0, accuracy="")
    with MetricsWriter(p) as m:
        m.append(iteration=1, loss=1.0, mse=0.05, rate_reg=1.0, accuracy=0.5)
    rows = read_metrics(p)
    assert len(rows) == 2
    assert rows[0]["iteration"] == "0" and rows[1]["accuracy"] == "0.5"


def test_export_raster_and_readout(tmp_path):
    raster = np.zeros((5, 3))
    raster[1, 2] = 1.0
    raster[4, 0] = 1.0
    p = str(tmp_path / "r.csv")
    export_raster(p, raster, dt_ms=2.0)
    lines = open(p).read().strip().split("\n")
    assert lines[0] == "t_ms,neuron_id"
    assert lines[1] == "2.0,2" and lines[2] == "8.0,0"
    y = np.arange(6, dtype=float).reshape(3, 2)
    py = str(tmp_path / "y.csv")
    export_readout(py, y)
    lines = open(py).read().strip().split("\n")
    assert lines[0] == "t_ms,out_0,out_1"
    assert lines[1] == "0.0,0,1"


def test_export_trajectories(tmp_path):
    pos = np.zeros((2, 3, 2))
    pos[1, 2] = [0.5, -0.25]
    rew = np.zeros((2, 3))
    rew[1, 2] = 1.0
    p = str(tmp_path / "t.csv")
    export_trajectories(p, pos, rew)
    lines = open(p).read().strip().split("\n")
    assert lines[0] == "episode,t_ms,x,y,reward"
    assert lines[-1] == "1,2.0,0.5,-0.25,1"


# ---------------------------------------------------------------------------
# CLI

def test_cli_validate_and_exit_codes(tmp_path):
    good = tmp_path / "good.yaml"
    good.write_text("task: meta-rl-smoke\n")
    assert main(["validate", str(good)]) == 0
    bad = tmp_path / "bad.yaml"
    bad.write_text("task: meta-rl\nppo:\n  clip_eps: 2.0\n")
    assert main(["validate", str(bad)]) == 1
    assert main(["validate", str(tmp_path / "missing.yaml")]) == 1


def test_cli_run_and_resume_continue_iterations(tmp_path, monkeypatch):
    monkeypatch.setenv("LSNN_OUTPUT_ROOT", str(tmp_path))
    cfg = tmp_path / "c.yaml"
    cfg.write_text("task: l2l-sinus-smoke\nseed: 3\noutput_dir: out\n"
                   "training:\n  iterations: 2\n")
    assert main(["run", str(cfg)]) == 0
    outdir = tmp_path / "out"
    assert (outdir / "checkpoint.bin").exists()
    ckpt = load_checkpoint(str(outdir / "checkpoint.bin"))
    assert ckpt.iteration == 2
    assert main(["resume", str(outdir / "checkpoint.bin"),
                 "--set", "training.iterations=4"]) == 0
    rows = read_metrics(str(outdir / "metrics.csv"))
    assert [r["iteration"] for r in rows] == ["0", "1", "2", "3"]
    ckpt2 = load_checkpoint(str(outdir / "checkpoint.bin"))
    assert ckpt2.iteration == 4


def test_cli_determinism(tmp_path, monkeypatch):
    monkeypatch.setenv("LSNN_OUTPUT_ROOT", str(tmp_path))
    for name in ("a", "b"):
        cfg = tmp_path / f"{name}.yaml"
        cfg.write_text(f"task: meta-rl-smoke\nseed: 11\noutput_dir: {name}\n")
        assert main(["run", str(cfg)]) == 0
    m_a = open(tmp_path / "a" / "metrics.csv").read()
    m_b = open(tmp_path / "b" / "metrics.csv").read()
    assert m_a == m_b


def test_cli_export_raster(tmp_path, monkeypatch):
    monkeypatch.setenv("LSNN_OUTPUT_ROOT", str(tmp_path))
    cfg = tmp_path / "c.yaml"
    cfg.write_text("task: meta-rl-smoke\nseed: 1\noutput_dir: out\n")
    assert main(["run", str(cfg)]) == 0
    from lsnn.rl import observation_size
    x = (np.random.default_rng(0).random((20, observation_size())) < 0.2)
    inp = tmp_path / "inp.csv"
    np.savetxt(inp, x.astype(float), delimiter=",")
    out = tmp_path / "raster.csv"
    assert main(["export-raster", str(tmp_path / "out" / "checkpoint.bin"),
                 str(inp), "--out", str(out)]) == 0
    assert open(out).readline().strip() == "t_ms,neuron_id"
