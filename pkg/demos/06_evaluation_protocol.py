#!/usr/bin/env python3
"""The evaluation protocol at toy scale: reconstruction MSE per method,
downstream classification relative to clean-data performance, ratioing, and
band-depth outcrop detection.  Takes a couple of
minutes; the desk-scale acceptance run uses a bigger scene and model."""

import numpy as np

from specdenoise import build_default_grid
from specdenoise import evaluate as ev
from specdenoise.baselines import CotcatLikeParams, SGParams, cotcat_like_values, sg_filter_values
from specdenoise.config import DEFAULT_BAND_DEPTH_PARAMS, DEFAULT_OUTCROP_THRESHOLD
from specdenoise.nn import ModelConfig, TrainConfig, UNet1D, denoise_values, train
from specdenoise.preprocess import NoiseParams, add_noise_dataset
from specdenoise.synth import SceneConfig, default_templates, generate_dataset

grid = build_default_grid()
scene = SceneConfig(
    templates=default_templates(),
    n_per_class=600,
    n_bland=1200,
    n_groups=10,
    holdout_class_ids=(5, 6),
    seed=11,
)
clean = generate_dataset(scene, grid)
noisy = add_noise_dataset(clean, NoiseParams(0.005, 0.005, seed=2))

model = UNet1D.build(ModelConfig(encoder_channels=(8, 16), seed=4))
rows = clean.split_of_rows()
tr, va = rows == "train", rows == "val"
train(
    model,
    (noisy.values[tr], clean.values[tr]),
    (noisy.values[va], clean.values[va]),
    TrainConfig(learning_rate=3e-3, batch_size=64, max_epochs=12, early_stop_patience=5),
    shuffle_seed=9,
)

clean_test = clean.split("test")
noisy_test = noisy.split("test")
denoised = {
    "n2n4m": clean_test.with_values(denoise_values(model, noisy_test.values)),
    "sg": clean_test.with_values(sg_filter_values(noisy_test.values, SGParams(), grid)),
    "cotcat_like": clean_test.with_values(
        cotcat_like_values(noisy_test.values, CotcatLikeParams(), grid)
    ),
    "noisy": noisy_test,
}

classifier = ev.centroid_classifier_train(clean.split("train"), grid)
report = ev.evaluate_methods(clean_test, denoised, classifier, grid)
print(ev.report_table(report))

# Outcrop detection after ratioing by the bland pool
bland = clean_test.kind_mask("bland")
for name in ("n2n4m", "noisy"):
    ds = denoised[name]
    ratioed = ds.with_values(ev.ratio_values(ds.values, ds.values[bland]))
    ref = clean_test.with_values(
        ev.ratio_values(clean_test.values, clean_test.values[bland])
    )
    rep = ev.outcrop_report(ratioed, DEFAULT_BAND_DEPTH_PARAMS,
                            DEFAULT_OUTCROP_THRESHOLD, grid, reference=ref)
    print(f"{name:6s}: detected {rep.n_detected:4d}  true {rep.n_true:4d}  "
          f"missed {rep.n_missed:3d}  spurious {rep.n_spurious:3d}")

bd = ev.band_depth_values(clean_test.values, DEFAULT_BAND_DEPTH_PARAMS[0], grid)
print(f"\nband depth {DEFAULT_BAND_DEPTH_PARAMS[0].name} on clean test: "
      f"bland mean {bd[bland].mean():+.4f}, mineral mean {bd[~bland].mean():+.4f}")
