"""Synthetic scene generation: labelled mineral and bland spectra in groups.

Each mineral class is a continuum (level + slope) multiplied by Gaussian
absorption dips.  Spectra carry a ``group_id`` that plays the role of a
source image: splits are assigned to whole groups, never to single spectra,
and designated held-out classes are generated only into test groups.

Bland pixels are a stand-in: spectrally featureless continua with small
level and slope jitter.  No claim of radiative-transfer realism is made.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import ConfigError, DataError
from .grid import WavelengthGrid
from .spectra import BLAND_LABEL, Dataset, Spectrum

# Split fractions by group count; the remainder goes to train.
VAL_GROUP_FRACTION = 0.15
TEST_GROUP_FRACTION = 0.15

_CLIP_LO = 1e-6
_CLIP_HI = 1.0


@dataclass(frozen=True)
class AbsorptionFeature:
    """Gaussian absorption dip: ``1 - depth * exp(-(lam-center)^2 / (2 width^2))``."""

    center_um: float
    depth: float
    width_um: float

    def __post_init__(self):
        if not 0.0 < self.depth <= 0.6:
            raise ConfigError(f"feature depth {self.depth} outside (0, 0.6]")
        if not 0.005 <= self.width_um <= 0.2:
            raise ConfigError(f"feature width {self.width_um} um outside [0.005, 0.2]")


@dataclass(frozen=True)
class MineralTemplate:
    """Parametric recipe for one mineral class."""

    class_id: int
    class_name: str
    continuum_level: float
    continuum_slope: float
    features: tuple[AbsorptionFeature, ...] = ()
    intra_class_jitter: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))
        if self.continuum_level <= 0:
            raise ConfigError(f"template {self.class_name}: continuum level must be positive")
        if not 0.0 <= self.intra_class_jitter < 1.0:
            raise ConfigError(f"template {self.class_name}: jitter must be in [0, 1)")


@dataclass(frozen=True)
class SceneConfig:
    """Everything needed to generate one synthetic scene deterministically."""

    templates: tuple[MineralTemplate, ...]
    n_per_class: int
    n_bland: int
    n_groups: int
    holdout_class_ids: tuple[int, ...] = ()
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "templates", tuple(self.templates))
        object.__setattr__(self, "holdout_class_ids", tuple(sorted(self.holdout_class_ids)))
        ids = [t.class_id for t in self.templates]
        if len(set(ids)) != len(ids):
            raise ConfigError("template class ids are not unique")
        if BLAND_LABEL in ids:
            raise ConfigError(f"class id {BLAND_LABEL} is reserved for bland pixels")
        unknown = set(self.holdout_class_ids) - set(ids)
        if unknown:
            raise ConfigError(f"holdout classes {sorted(unknown)} not among template class ids")
        if self.n_groups < 3:
            raise ConfigError(f"n_groups must be >= 3, got {self.n_groups}")
        if self.n_per_class < 0 or self.n_bland < 0:
            raise ConfigError("spectrum counts must be nonnegative")


def _feature_from_dict(d) -> AbsorptionFeature:
    return AbsorptionFeature(
        center_um=float(d["center_um"]), depth=float(d["depth"]), width_um=float(d["width_um"])
    )


def template_from_dict(d) -> MineralTemplate:
    return MineralTemplate(
        class_id=int(d["class_id"]),
        class_name=str(d["class_name"]),
        continuum_level=float(d["continuum_level"]),
        continuum_slope=float(d["continuum_slope"]),
        features=tuple(_feature_from_dict(f) for f in d.get("features", [])),
        intra_class_jitter=float(d.get("intra_class_jitter", 0.0)),
    )


def template_to_dict(t: MineralTemplate) -> dict:
    return {
        "class_id": t.class_id,
        "class_name": t.class_name,
        "continuum_level": t.continuum_level,
        "continuum_slope": t.continuum_slope,
        "intra_class_jitter": t.intra_class_jitter,
        "features": [
            {"center_um": f.center_um, "depth": f.depth, "width_um": f.width_um}
            for f in t.features
        ],
    }


def default_templates() -> tuple[MineralTemplate, ...]:
    """Mineral templates shipped with the package (versioned JSON table)."""
    raw = json.loads(
        resources.files("specdenoise").joinpath("data/default_templates.json").read_text()
    )
    return tuple(template_from_dict(d) for d in raw["templates"])


def default_bland_template() -> MineralTemplate:
    raw = json.loads(
        resources.files("specdenoise").joinpath("data/default_templates.json").read_text()
    )
    return template_from_dict(raw["bland"])


def template_curve(t: MineralTemplate, grid: WavelengthGrid) -> np.ndarray:
    """Nominal (jitter-free) spectrum of a template on the grid."""
    lam = grid.wavelengths
    curve = t.continuum_level + t.continuum_slope * (lam - lam[0])
    for f in t.features:
        curve = curve * (1.0 - f.depth * np.exp(-((lam - f.center_um) ** 2) / (2.0 * f.width_um**2)))
    return curve


def clean_values(t: MineralTemplate, grid: WavelengthGrid, rng: np.random.Generator) -> np.ndarray:
    """One jittered realisation of a template.

    The nominal curve must already lie in (0, 1]; templates violating that
    are rejected.  Jitter multiplies the continuum level, the continuum
    slope and each feature depth by independent ``1 + jitter * N(0,1)``
    factors (drawn in that order), then the result is clamped to
    (1e-6, 1].
    """
    nominal = template_curve(t, grid)
    if np.any(nominal <= 0.0) or np.any(nominal > 1.0):
        raise DataError(
            f"template {t.class_name}: nominal spectrum leaves (0, 1] "
            f"(min {nominal.min():.4g}, max {nominal.max():.4g})"
        )
    j = t.intra_class_jitter
    lam = grid.wavelengths
    level = t.continuum_level * max(1.0 + j * rng.standard_normal(), 0.05)
    slope = t.continuum_slope * (1.0 + j * rng.standard_normal())
    values = level + slope * (lam - lam[0])
    for f in t.features:
        depth = float(np.clip(f.depth * (1.0 + j * rng.standard_normal()), 1e-4, 0.95))
        values = values * (1.0 - depth * np.exp(-((lam - f.center_um) ** 2) / (2.0 * f.width_um**2)))
    return np.clip(values, _CLIP_LO, _CLIP_HI)


def clean_spectrum(t: MineralTemplate, grid: WavelengthGrid, rng: np.random.Generator) -> Spectrum:
    """Jittered realisation wrapped as a Spectrum (group assigned later)."""
    kind = "bland" if not t.features and t.class_id == BLAND_LABEL else "mineral"
    return Spectrum(values=clean_values(t, grid, rng), label=t.class_id, group_id=-1,
                    pixel_kind=kind)


def assign_group_splits(n_groups: int, seed: int) -> dict[int, str]:
    """Assign groups to train/val/test by count (roughly 70/15/15)."""
    n_test = max(1, round(TEST_GROUP_FRACTION * n_groups))
    n_val = max(1, round(VAL_GROUP_FRACTION * n_groups))
    n_train = n_groups - n_test - n_val
    if n_train < 1:
        raise ConfigError(f"n_groups={n_groups} leaves no train groups after the 70/15/15 split")
    rng = np.random.default_rng([seed, 0])
    perm = rng.permutation(n_groups)
    assignment: dict[int, str] = {}
    for g in perm[:n_test]:
        assignment[int(g)] = "test"
    for g in perm[n_test:n_test + n_val]:
        assignment[int(g)] = "val"
    for g in perm[n_test + n_val:]:
        assignment[int(g)] = "train"
    return assignment


def generate_dataset(
    cfg: SceneConfig,
    grid: WavelengthGrid,
    bland_template: MineralTemplate | None = None,
) -> Dataset:
    """Generate the full labelled scene.

    Output is a pure function of (cfg, grid): group splits come from
    ``[seed, 0]`` and every spectrum draws from its own ``[seed, 1, index]``
    stream, so neither generation order nor parallelism can change the
    result.  Held-out classes are placed round-robin over test groups only;
    all other classes (and bland pixels) round-robin over every group.
    """
    if bland_template is None:
        bland_template = default_bland_template()
    splits = assign_group_splits(cfg.n_groups, cfg.seed)
    test_groups = sorted(g for g, s in splits.items() if s == "test")
    all_groups = sorted(splits)
    if cfg.holdout_class_ids and not test_groups:
        raise ConfigError("holdout classes configured but no test groups exist")

    templates = sorted(cfg.templates, key=lambda t: t.class_id)
    n_total = len(templates) * cfg.n_per_class + cfg.n_bland
    values = np.empty((n_total, grid.n_channels), dtype=np.float64)
    labels = np.empty(n_total, dtype=np.int64)
    group_ids = np.empty(n_total, dtype=np.int64)
    kinds = np.empty(n_total, dtype="U7")

    idx = 0
    for t in templates:
        allowed = test_groups if t.class_id in cfg.holdout_class_ids else all_groups
        for j in range(cfg.n_per_class):
            rng = np.random.default_rng([cfg.seed, 1, idx])
            values[idx] = clean_values(t, grid, rng)
            labels[idx] = t.class_id
            group_ids[idx] = allowed[j % len(allowed)]
            kinds[idx] = "mineral"
            idx += 1
    for j in range(cfg.n_bland):
        rng = np.random.default_rng([cfg.seed, 1, idx])
        values[idx] = clean_values(bland_template, grid, rng)
        labels[idx] = BLAND_LABEL
        group_ids[idx] = all_groups[j % len(all_groups)]
        kinds[idx] = "bland"
        idx += 1

    return Dataset(
        ids=np.arange(n_total, dtype=np.int64),
        values=values,
        labels=labels,
        group_ids=group_ids,
        kinds=kinds,
        split_assignment=splits,
    )


def scene_config_from_dict(d, default_seed: int | None = None) -> SceneConfig:
    """Build a SceneConfig from a parsed JSON object (CLI run configs)."""
    templates = (
        tuple(template_from_dict(t) for t in d["templates"])
        if "templates" in d
        else default_templates()
    )
    seed = d.get("seed", default_seed)
    if seed is None:
        raise ConfigError("scene.seed: missing and no default provided")
    return SceneConfig(
        templates=templates,
        n_per_class=int(d["n_per_class"]),
        n_bland=int(d["n_bland"]),
        n_groups=int(d["n_groups"]),
        holdout_class_ids=tuple(int(c) for c in d.get("holdout_class_ids", ())),
        seed=int(seed),
    )
