#!/usr/bin/env python3
"""Drive the whole pipeline through the command-line interface: write a run
config, then gen -> noise -> train -> denoise (three methods) -> eval ->
summary, all inside a temporary directory."""

import json
import tempfile
from pathlib import Path

from specdenoise.cli import main

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    config = {
        "schema": "specdenoise-run/1",
        "seed": 31,
        "paths": {"data_dir": "data", "model_dir": "model", "report_dir": "report"},
        "scene": {
            "n_per_class": 80,
            "n_bland": 160,
            "n_groups": 5,
            "holdout_class_ids": [5, 6],
        },
        "noise": {"sigma_base": 0.005, "sigma_uniform_max": 0.005},
        "model": {"encoder_channels": [8, 16]},
        "train": {"learning_rate": 3e-3, "batch_size": 64, "max_epochs": 3,
                  "early_stop_patience": 3},
    }
    config_path = tmp / "run.json"
    config_path.write_text(json.dumps(config, indent=2))

    steps = [
        ["gen", "--config", str(config_path)],
        ["noise", "--config", str(config_path)],
        ["train", "--config", str(config_path)],
    ]
    for method in ("sg", "cotcat_like", "n2n4m"):
        steps.append([
            "denoise", "--config", str(config_path), "--method", method,
            "--in", str(tmp / "data" / "noisy.csv"),
            "--out", str(tmp / "data" / f"denoised_{method}.csv"),
        ])
    steps.append(["eval", "--config", str(config_path)])
    steps.append([
        "summary", "--config", str(config_path), "--param", "bd2310",
        "--in", str(tmp / "data" / f"denoised_n2n4m.csv"),
    ])

    for argv in steps:
        print(f"\n$ specdenoise {' '.join(argv)}")
        rc = main(argv)
        assert rc == 0, f"exit code {rc}"

    print("\nfiles produced:")
    for p in sorted(tmp.rglob("*")):
        if p.is_file():
            print(f"  {p.relative_to(tmp)}  ({p.stat().st_size} bytes)")
