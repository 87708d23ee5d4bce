"""Spectrum and dataset containers with split bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .grid import WavelengthGrid

PIXEL_KINDS = ("mineral", "bland")
SPLITS = ("train", "val", "test")

# Label reserved for spectrally featureless pixels.
BLAND_LABEL = 0


@dataclass(frozen=True)
class Spectrum:
    """One I/F reflectance vector with its label and synthetic image id."""

    values: np.ndarray
    label: int
    group_id: int
    pixel_kind: str = "mineral"

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError(f"spectrum values must be 1-D, got shape {v.shape}")
        if self.pixel_kind not in PIXEL_KINDS:
            raise ValueError(f"pixel_kind {self.pixel_kind!r} not in {PIXEL_KINDS}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "label", int(self.label))
        object.__setattr__(self, "group_id", int(self.group_id))


@dataclass(frozen=True)
class Violation:
    """One broken spectrum invariant: which rule, at which channel."""

    rule: str
    channel: int | None
    message: str


def validate_spectrum(s: Spectrum, grid: WavelengthGrid) -> list[Violation]:
    """Check a spectrum against the post-preprocessing invariants.

    Returns an empty list iff the spectrum is well formed: length matches the
    grid, every value finite, and every value in (0, 1].
    """
    violations: list[Violation] = []
    v = s.values
    if v.size != grid.n_channels:
        violations.append(
            Violation("length", None, f"expected {grid.n_channels} channels, got {v.size}")
        )
        return violations
    finite = np.isfinite(v)
    for c in np.flatnonzero(~finite):
        violations.append(Violation("non-finite", int(c), f"channel {c} is {v[c]}"))
    for c in np.flatnonzero(finite & (v > 1.0)):
        violations.append(Violation("I/F > 1", int(c), f"channel {c} has I/F {v[c]}"))
    for c in np.flatnonzero(finite & (v <= 0.0)):
        violations.append(Violation("I/F <= 0", int(c), f"channel {c} has I/F {v[c]}"))
    violations.sort(key=lambda x: -1 if x.channel is None else x.channel)
    return violations


class Dataset:
    """Column-oriented collection of spectra plus a group-to-split map.

    Spectra are stored as a dense (n, 350) matrix for vectorised processing;
    :meth:`spectrum` materialises single rows.  All arrays are read-only; any
    transformation produces a new Dataset.
    """

    __slots__ = ("ids", "values", "labels", "group_ids", "kinds", "split_assignment")

    def __init__(self, ids, values, labels, group_ids, kinds, split_assignment=None):
        ids = np.array(ids, dtype=np.int64)
        values = np.array(values, dtype=np.float64)
        labels = np.array(labels, dtype=np.int64)
        group_ids = np.array(group_ids, dtype=np.int64)
        kinds = np.array(kinds, dtype="U7")
        if values.ndim != 2:
            raise DataError(f"values must be 2-D, got shape {values.shape}")
        n = values.shape[0]
        for name, arr in (("ids", ids), ("labels", labels), ("group_ids", group_ids), ("kinds", kinds)):
            if arr.shape != (n,):
                raise DataError(f"{name} has shape {arr.shape}, expected ({n},)")
        bad_kinds = set(np.unique(kinds)) - set(PIXEL_KINDS)
        if bad_kinds:
            raise DataError(f"unknown pixel kinds: {sorted(bad_kinds)}")
        if len(np.unique(ids)) != n:
            raise DataError("spectrum ids are not unique")
        assignment = dict(split_assignment or {})
        for g, split in assignment.items():
            if split not in SPLITS:
                raise DataError(f"group {g}: unknown split {split!r}")
        if assignment:
            missing = sorted(set(group_ids.tolist()) - set(assignment))
            if missing:
                raise DataError(f"groups without a split assignment: {missing}")
        for arr in (ids, values, labels, group_ids, kinds):
            arr.flags.writeable = False
        self.ids = ids
        self.values = values
        self.labels = labels
        self.group_ids = group_ids
        self.kinds = kinds
        self.split_assignment = {int(g): str(s) for g, s in assignment.items()}

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def spectrum(self, i: int) -> Spectrum:
        return Spectrum(
            values=self.values[i],
            label=int(self.labels[i]),
            group_id=int(self.group_ids[i]),
            pixel_kind=str(self.kinds[i]),
        )

    def subset(self, mask) -> "Dataset":
        mask = np.asarray(mask)
        kept_groups = set(np.unique(self.group_ids[mask]).tolist())
        assignment = {g: s for g, s in self.split_assignment.items() if g in kept_groups}
        return Dataset(
            self.ids[mask], self.values[mask], self.labels[mask],
            self.group_ids[mask], self.kinds[mask], assignment,
        )

    def split(self, name: str) -> "Dataset":
        """Subset of spectra whose group is assigned to the named split."""
        if name not in SPLITS:
            raise DataError(f"unknown split {name!r}")
        if not self.split_assignment:
            raise DataError("dataset has no split assignment")
        groups = {g for g, s in self.split_assignment.items() if s == name}
        mask = np.isin(self.group_ids, sorted(groups))
        return self.subset(mask)

    def split_of_rows(self) -> np.ndarray:
        """Per-row split name, following the group assignment."""
        if not self.split_assignment:
            raise DataError("dataset has no split assignment")
        return np.array([self.split_assignment[int(g)] for g in self.group_ids], dtype="U5")

    def with_values(self, values) -> "Dataset":
        """Same metadata, new spectral values (e.g. after denoising)."""
        values = np.asarray(values, dtype=np.float64)
        if values.shape != self.values.shape:
            raise DataError(f"values shape {values.shape} != {self.values.shape}")
        return Dataset(self.ids, values, self.labels, self.group_ids, self.kinds,
                       self.split_assignment)

    def kind_mask(self, kind: str) -> np.ndarray:
        if kind not in PIXEL_KINDS:
            raise DataError(f"unknown pixel kind {kind!r}")
        return self.kinds == kind


def validate_dataset(ds: Dataset, grid: WavelengthGrid, holdout_class_ids=()) -> list[str]:
    """Dataset-level invariant check; returns human-readable problems.

    Verifies per-spectrum invariants, split coverage, and that held-out
    classes only occur in test-assigned groups.
    """
    problems: list[str] = []
    if ds.values.shape[1] != grid.n_channels:
        problems.append(f"values have {ds.values.shape[1]} channels, grid has {grid.n_channels}")
        return problems
    bad = ~np.isfinite(ds.values) | (ds.values > 1.0) | (ds.values <= 0.0)
    for row in np.flatnonzero(bad.any(axis=1))[:20]:
        ch = int(np.flatnonzero(bad[row])[0])
        problems.append(f"spectrum id {ds.ids[row]}: invalid value {ds.values[row, ch]} at channel {ch}")
    if holdout_class_ids:
        if not ds.split_assignment:
            problems.append("holdout classes requested but dataset has no split assignment")
        else:
            row_split = ds.split_of_rows()
            held = np.isin(ds.labels, sorted(holdout_class_ids))
            leaked = held & (row_split != "test")
            for row in np.flatnonzero(leaked)[:20]:
                problems.append(
                    f"spectrum id {ds.ids[row]} of held-out class {ds.labels[row]} "
                    f"in split {row_split[row]!r}"
                )
    return problems
