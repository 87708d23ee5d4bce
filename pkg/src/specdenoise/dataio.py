"""CSV interchange formats for datasets, wavelengths, splits and loss curves.

Dataset CSV layout: header ``id,group_id,label,kind,w0001,...,w0350`` where
column ``wNNNN`` holds the I/F value of 1-based channel NNNN.  A sidecar
single-row CSV carries the 350 wavelengths.  Reals are written in scientific
notation with 11 significant digits.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

from .errors import DataError
from .grid import MIN_SEGMENT_GAP_UM, N_CHANNELS, WavelengthGrid
from .spectra import Dataset

FLOAT_FORMAT = "%.10e"

_META_COLUMNS = ["id", "group_id", "label", "kind"]


def channel_columns(n_channels: int = N_CHANNELS) -> list[str]:
    return [f"w{c + 1:04d}" for c in range(n_channels)]


def write_dataset_csv(path, ds: Dataset) -> None:
    df = pd.DataFrame(
        {
            "id": ds.ids,
            "group_id": ds.group_ids,
            "label": ds.labels,
            "kind": ds.kinds,
        }
    )
    spec = pd.DataFrame(ds.values, columns=channel_columns(ds.values.shape[1]))
    pd.concat([df, spec], axis=1).to_csv(
        path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
    )


def read_dataset_csv(path, split_assignment=None) -> Dataset:
    path = Path(path)
    if not path.exists():
        raise DataError(f"dataset file not found: {path}")
    df = pd.read_csv(path)
    expected = _META_COLUMNS + channel_columns(len(df.columns) - len(_META_COLUMNS))
    if list(df.columns) != expected:
        raise DataError(f"{path}: unexpected dataset CSV header")
    values = df[expected[len(_META_COLUMNS):]].to_numpy(dtype=np.float64)
    return Dataset(
        ids=df["id"].to_numpy(),
        values=values,
        labels=df["label"].to_numpy(),
        group_ids=df["group_id"].to_numpy(),
        kinds=df["kind"].to_numpy(dtype="U7"),
        split_assignment=split_assignment,
    )


def write_wavelengths_csv(path, grid: WavelengthGrid) -> None:
    line = ",".join(FLOAT_FORMAT % w for w in grid.wavelengths)
    Path(path).write_text(line + "\n", encoding="utf-8")


def read_wavelengths_csv(path) -> WavelengthGrid:
    path = Path(path)
    if not path.exists():
        raise DataError(f"wavelength file not found: {path}")
    text = path.read_text(encoding="utf-8").strip()
    w = np.array([float(tok) for tok in text.split(",")], dtype=np.float64)
    gaps = np.diff(w)
    breaks = np.flatnonzero(gaps > MIN_SEGMENT_GAP_UM)
    if breaks.size != 1:
        raise DataError(f"{path}: expected exactly one segment gap, found {breaks.size}")
    return WavelengthGrid(w, int(breaks[0]) + 1)


def write_split_manifest(path, split_assignment: dict[int, str]) -> None:
    lines = ["group_id,split"]
    lines += [f"{g},{split_assignment[g]}" for g in sorted(split_assignment)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_split_manifest(path) -> dict[int, str]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"split manifest not found: {path}")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "group_id,split":
        raise DataError(f"{path}: expected header 'group_id,split'")
    assignment: dict[int, str] = {}
    for line in lines[1:]:
        if not line.strip():
            continue
        g, split = line.split(",")
        assignment[int(g)] = split
    return assignment


def write_loss_history_csv(path, history) -> None:
    """Write per-epoch stats as ``epoch,train_mse,val_mse`` rows."""
    lines = ["epoch,train_mse,val_mse"]
    for rec in history:
        lines.append(f"{rec.epoch},{FLOAT_FORMAT % rec.train_mse},{FLOAT_FORMAT % rec.val_mse}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
