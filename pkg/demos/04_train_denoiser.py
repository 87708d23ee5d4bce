#!/usr/bin/env python3
"""Train the 1D U-Net denoiser end to end at toy scale: generate a small
scene, add noise, train with early stopping, denoise the test split, and
round-trip the checkpoint.  Runs in a couple of minutes on a laptop."""

import tempfile
import time
from pathlib import Path

import numpy as np

from specdenoise import build_default_grid
from specdenoise.nn import ModelConfig, TrainConfig, UNet1D, denoise_values, train
from specdenoise.nn.checkpoint import load_checkpoint, save_checkpoint
from specdenoise.preprocess import NoiseParams, add_noise_dataset
from specdenoise.synth import SceneConfig, default_templates, generate_dataset

grid = build_default_grid()
scene = SceneConfig(
    templates=default_templates(),
    n_per_class=600,
    n_bland=1200,
    n_groups=10,
    holdout_class_ids=(5, 6),
    seed=7,
)
clean = generate_dataset(scene, grid)
noisy = add_noise_dataset(clean, NoiseParams(0.005, 0.005, seed=1))
rows = clean.split_of_rows()
tr, va, te = rows == "train", rows == "val", rows == "test"
print(f"{len(clean)} spectra: {tr.sum()} train / {va.sum()} val / {te.sum()} test")

model = UNet1D.build(ModelConfig(encoder_channels=(8, 16), seed=0))
print(f"model: {model.num_params} parameters, channels {model.config.encoder_channels}")

t0 = time.perf_counter()
ckpt, history = train(
    model,
    (noisy.values[tr], clean.values[tr]),
    (noisy.values[va], clean.values[va]),
    TrainConfig(learning_rate=3e-3, batch_size=64, max_epochs=12, early_stop_patience=5),
    shuffle_seed=5,
    log=print,
)
print(f"trained {ckpt.epochs_run} epochs in {time.perf_counter() - t0:.0f} s, "
      f"best val MSE {ckpt.best_val_loss:.3e}")

denoised = denoise_values(model, noisy.values[te])
mse_noisy = float(np.mean((noisy.values[te] - clean.values[te]) ** 2))
mse_denoised = float(np.mean((denoised - clean.values[te]) ** 2))
print(f"\ntest MSE: noisy {mse_noisy:.3e} -> denoised {mse_denoised:.3e} "
      f"({mse_denoised / mse_noisy:.1%} of the noise level)")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "demo.ckpt"
    save_checkpoint(path, ckpt)
    again = denoise_values(load_checkpoint(path), noisy.values[te])
    print(f"checkpoint round trip bit-exact: {np.array_equal(denoised, again)}")
    print(f"checkpoint size: {path.stat().st_size / 1024:.0f} KiB")
