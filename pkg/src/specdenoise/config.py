"""Versioned run configuration: one JSON file drives the whole pipeline.

Module seeds derive from the single global seed (scene: +0, noise: +1,
model: +2, shuffle: +3) so a ``--seed`` override changes every stage
uniformly.  Validation errors name the offending schema path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .baselines import CotcatLikeParams, SGParams
from .errors import ConfigError
from .evaluate import BandDepthParam
from .nn.train import TrainConfig
from .nn.unet import ModelConfig
from .preprocess import NoiseParams
from .synth import SceneConfig, scene_config_from_dict

SCHEMA_ID = "specdenoise-run/1"

DEFAULT_BAND_DEPTH_PARAMS = (
    BandDepthParam("bd1410", 1.34, 1.41, 1.50),
    BandDepthParam("bd1930", 1.84, 1.93, 2.12),
    BandDepthParam("bd2210", 2.15, 2.21, 2.27),
    BandDepthParam("bd2310", 2.25, 2.31, 2.40),
)
DEFAULT_OUTCROP_THRESHOLD = 0.05

DATASET_FILES = {
    "clean": "clean.csv",
    "noisy": "noisy.csv",
    "wavelengths": "wavelengths.csv",
    "splits": "splits.csv",
}
CHECKPOINT_FILE = "n2n4m.ckpt"
LOSS_HISTORY_FILE = "loss_history.csv"


@dataclass(frozen=True)
class RunPaths:
    data_dir: Path
    model_dir: Path
    report_dir: Path

    def dataset(self, name: str) -> Path:
        return self.data_dir / DATASET_FILES[name]

    def denoised(self, method: str) -> Path:
        return self.data_dir / f"denoised_{method}.csv"

    @property
    def checkpoint(self) -> Path:
        return self.model_dir / CHECKPOINT_FILE

    @property
    def loss_history(self) -> Path:
        return self.model_dir / LOSS_HISTORY_FILE


@dataclass(frozen=True)
class RunConfig:
    schema: str
    seed: int
    paths: RunPaths
    scene: SceneConfig
    noise: NoiseParams
    clamp_noisy: bool
    model: ModelConfig
    train: TrainConfig
    sg: SGParams
    cotcat: CotcatLikeParams
    band_depth_params: tuple[BandDepthParam, ...] = DEFAULT_BAND_DEPTH_PARAMS
    outcrop_threshold: float = DEFAULT_OUTCROP_THRESHOLD

    @property
    def shuffle_seed(self) -> int:
        return self.seed + 3

    def band_depth_param(self, name: str) -> BandDepthParam:
        for p in self.band_depth_params:
            if p.name == name:
                return p
        raise ConfigError(
            f"band_depth_params: unknown parameter {name!r}; "
            f"available: {[p.name for p in self.band_depth_params]}"
        )


def _expect(d: dict, path: str, key: str, kind, default=None, required=False):
    if key not in d:
        if required:
            raise ConfigError(f"{path}{key}: missing required field")
        return default
    value = d[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ConfigError(f"{path}{key}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def load_run_config(path, seed_override: int | None = None) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return run_config_from_dict(raw, base_dir=path.parent, seed_override=seed_override)


def run_config_from_dict(raw: dict, base_dir=".", seed_override: int | None = None) -> RunConfig:
    schema = _expect(raw, "", "schema", str, required=True)
    if schema != SCHEMA_ID:
        raise ConfigError(f"schema: expected {SCHEMA_ID!r}, got {schema!r}")
    seed = seed_override if seed_override is not None else _expect(raw, "", "seed", int, required=True)

    paths_raw = _expect(raw, "", "paths", dict, required=True)
    base = Path(base_dir)

    def _path(key: str) -> Path:
        p = Path(_expect(paths_raw, "paths.", key, str, required=True))
        return p if p.is_absolute() else base / p

    paths = RunPaths(_path("data_dir"), _path("model_dir"), _path("report_dir"))

    scene_raw = dict(_expect(raw, "", "scene", dict, required=True))
    if seed_override is not None:
        scene_raw.pop("seed", None)
    try:
        scene = scene_config_from_dict(scene_raw, default_seed=seed)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"scene: {exc}") from exc

    noise_raw = _expect(raw, "", "noise", dict, default={})
    noise = NoiseParams(
        sigma_base=_expect(noise_raw, "noise.", "sigma_base", float, default=0.005),
        sigma_uniform_max=_expect(noise_raw, "noise.", "sigma_uniform_max", float, default=0.005),
        seed=seed + 1,
    )

    model_raw = _expect(raw, "", "model", dict, default={})
    model = ModelConfig(
        in_length=_expect(model_raw, "model.", "in_length", int, default=350),
        pad_to=_expect(model_raw, "model.", "pad_to", int, default=352),
        kernel_size=_expect(model_raw, "model.", "kernel_size", int, default=5),
        encoder_channels=tuple(
            _expect(model_raw, "model.", "encoder_channels", list, default=[32, 64, 128])
        ),
        activation=_expect(model_raw, "model.", "activation", str, default="relu"),
        dtype=_expect(model_raw, "model.", "dtype", str, default="float32"),
        seed=seed + 2,
    )

    train_raw = _expect(raw, "", "train", dict, default={})
    train = TrainConfig(
        learning_rate=_expect(train_raw, "train.", "learning_rate", float, default=1e-3),
        batch_size=_expect(train_raw, "train.", "batch_size", int, default=256),
        max_epochs=_expect(train_raw, "train.", "max_epochs", int, default=100),
        early_stop_patience=_expect(train_raw, "train.", "early_stop_patience", int, default=5),
        adam_beta1=_expect(train_raw, "train.", "adam_beta1", float, default=0.9),
        adam_beta2=_expect(train_raw, "train.", "adam_beta2", float, default=0.999),
        adam_eps=_expect(train_raw, "train.", "adam_eps", float, default=1e-8),
    )

    sg_raw = _expect(raw, "", "sg", dict, default={})
    sg = SGParams(
        window=_expect(sg_raw, "sg.", "window", int, default=11),
        poly_order=_expect(sg_raw, "sg.", "poly_order", int, default=3),
    )

    cc_raw = _expect(raw, "", "cotcat_like", dict, default={})
    cotcat = CotcatLikeParams(
        spike_window=_expect(cc_raw, "cotcat_like.", "spike_window", int, default=7),
        spike_threshold=_expect(cc_raw, "cotcat_like.", "spike_threshold", float, default=4.0),
        smooth_window=_expect(cc_raw, "cotcat_like.", "smooth_window", int, default=5),
        iterations=_expect(cc_raw, "cotcat_like.", "iterations", int, default=1),
    )

    bd_raw = _expect(raw, "", "band_depth_params", list, default=None)
    if bd_raw is None:
        bd_params = DEFAULT_BAND_DEPTH_PARAMS
    else:
        bd_params = []
        for i, item in enumerate(bd_raw):
            prefix = f"band_depth_params[{i}]."
            if not isinstance(item, dict):
                raise ConfigError(f"band_depth_params[{i}]: expected object")
            bd_params.append(
                BandDepthParam(
                    name=_expect(item, prefix, "name", str, required=True),
                    left_um=_expect(item, prefix, "left_um", float, required=True),
                    center_um=_expect(item, prefix, "center_um", float, required=True),
                    right_um=_expect(item, prefix, "right_um", float, required=True),
                )
            )
        bd_params = tuple(bd_params)

    return RunConfig(
        schema=schema,
        seed=int(seed),
        paths=paths,
        scene=scene,
        noise=noise,
        clamp_noisy=_expect(raw, "", "clamp_noisy", bool, default=False),
        model=model,
        train=train,
        sg=sg,
        cotcat=cotcat,
        band_depth_params=bd_params,
        outcrop_threshold=_expect(raw, "", "outcrop_threshold", float,
                                  default=DEFAULT_OUTCROP_THRESHOLD),
    )
