import numpy as np
import pytest

from specdenoise.errors import CheckpointError
from specdenoise.nn.checkpoint import MAGIC, Checkpoint, load_checkpoint, save_checkpoint
from specdenoise.nn.train import denoise_values
from specdenoise.nn.unet import ModelConfig, UNet1D

CFG = ModelConfig(in_length=14, pad_to=16, kernel_size=5, encoder_channels=(2, 4), seed=5)


def make_checkpoint(seed=5):
    model = UNet1D.build(ModelConfig(**{**CFG.to_dict(), "seed": seed}))
    return Checkpoint(config=model.config, params=model.params, epochs_run=7,
                      best_val_loss=1.25e-4)


def test_roundtrip_preserves_everything(tmp_path):
    ckpt = make_checkpoint()
    path = tmp_path / "model.ckpt"
    save_checkpoint(path, ckpt)
    back = load_checkpoint(path)
    assert back.config == ckpt.config
    assert back.epochs_run == 7
    assert back.best_val_loss == 1.25e-4
    assert list(back.params) == list(ckpt.params)
    for n in ckpt.params:
        assert np.array_equal(back.params[n], ckpt.params[n])


def test_save_load_save_byte_identical(tmp_path):
    ckpt = make_checkpoint()
    p1, p2 = tmp_path / "a.ckpt", tmp_path / "b.ckpt"
    save_checkpoint(p1, ckpt)
    save_checkpoint(p2, load_checkpoint(p1))
    assert p1.read_bytes() == p2.read_bytes()


def test_magic_bytes_lead_the_file(tmp_path):
    path = tmp_path / "m.ckpt"
    save_checkpoint(path, make_checkpoint())
    assert path.read_bytes()[:6] == MAGIC == b"N2N4M\x00"


def test_corrupted_magic_rejected_with_filename(tmp_path):
    path = tmp_path / "bad.ckpt"
    save_checkpoint(path, make_checkpoint())
    data = bytearray(path.read_bytes())
    data[0] ^= 0xFF
    path.write_bytes(bytes(data))
    with pytest.raises(CheckpointError, match="bad.ckpt"):
        load_checkpoint(path)


def test_truncated_file_rejected(tmp_path):
    path = tmp_path / "t.ckpt"
    save_checkpoint(path, make_checkpoint())
    path.write_bytes(path.read_bytes()[:-10])
    with pytest.raises(CheckpointError, match="truncated"):
        load_checkpoint(path)


def test_trailing_garbage_rejected(tmp_path):
    path = tmp_path / "g.ckpt"
    save_checkpoint(path, make_checkpoint())
    path.write_bytes(path.read_bytes() + b"\x00\x01")
    with pytest.raises(CheckpointError, match="trailing"):
        load_checkpoint(path)


def test_shape_mismatch_against_config_rejected(tmp_path):
    ckpt = make_checkpoint()
    bad_params = dict(ckpt.params)
    bad_params["final.w"] = np.zeros((1, 3, 5), dtype=np.float32)
    bad = Checkpoint(config=ckpt.config, params=bad_params, epochs_run=1, best_val_loss=0.1)
    path = tmp_path / "s.ckpt"
    save_checkpoint(path, bad)
    with pytest.raises(CheckpointError, match="final.w"):
        load_checkpoint(path)


def test_missing_file_rejected():
    with pytest.raises(CheckpointError):
        load_checkpoint("/nonexistent/x.ckpt")


def test_load_then_denoise_bit_identical(tmp_path):
    model = UNet1D.build(CFG)
    ckpt = Checkpoint(config=CFG, params=model.params, epochs_run=3, best_val_loss=0.5)
    path = tmp_path / "d.ckpt"
    save_checkpoint(path, ckpt)
    x = np.random.default_rng(8).random((6, 14))
    before = denoise_values(ckpt, x)
    after = denoise_values(load_checkpoint(path), x)
    assert np.array_equal(before, after)
