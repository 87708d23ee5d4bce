"""Binary checkpoint serialization with a bit-exact round trip.

Layout (all integers little-endian unsigned 32-bit):

    magic  b"N2N4M\\x00"
    u32    format version
    u32    header length, then that many bytes of UTF-8 JSON holding the
           model configuration and training metadata
    u32    tensor count
    per tensor:
        u32  name length, then UTF-8 name
        u32  rank
        u32  dims[rank]
        raw little-endian IEEE-754 float32 values

Parameters are stored as float32; models built at float64 are cast on save.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import CheckpointError
from .unet import ModelConfig, parameter_shapes

MAGIC = b"N2N4M\x00"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class Checkpoint:
    """Trained parameters plus the config that shapes them."""

    config: ModelConfig
    params: dict[str, np.ndarray]
    epochs_run: int
    best_val_loss: float
    version: int = FORMAT_VERSION


def save_checkpoint(path, ckpt: Checkpoint) -> None:
    header = {
        "model": ckpt.config.to_dict(),
        "training": {
            "epochs_run": int(ckpt.epochs_run),
            "best_val_loss": float(ckpt.best_val_loss),
        },
    }
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    chunks = [MAGIC, struct.pack("<I", ckpt.version), struct.pack("<I", len(header_bytes)),
              header_bytes, struct.pack("<I", len(ckpt.params))]
    for name, arr in ckpt.params.items():
        name_bytes = name.encode("utf-8")
        chunks.append(struct.pack("<I", len(name_bytes)))
        chunks.append(name_bytes)
        chunks.append(struct.pack("<I", arr.ndim))
        chunks.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
        chunks.append(np.ascontiguousarray(arr, dtype="<f4").tobytes())
    Path(path).write_bytes(b"".join(chunks))


class _Reader:
    def __init__(self, data: bytes, path):
        self.data = data
        self.pos = 0
        self.path = path

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise CheckpointError(f"{self.path}: truncated checkpoint file")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]


def load_checkpoint(path) -> Checkpoint:
    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"checkpoint file not found: {path}")
    r = _Reader(path.read_bytes(), path)
    if r.take(len(MAGIC)) != MAGIC:
        raise CheckpointError(f"{path}: bad magic bytes, not a checkpoint file")
    version = r.u32()
    if version != FORMAT_VERSION:
        raise CheckpointError(f"{path}: unsupported format version {version}")
    try:
        header = json.loads(r.take(r.u32()).decode("utf-8"))
        config = ModelConfig.from_dict(header["model"])
        training = header["training"]
    except (ValueError, KeyError, TypeError) as exc:
        raise CheckpointError(f"{path}: malformed header: {exc}") from exc
    n_tensors = r.u32()
    params: dict[str, np.ndarray] = {}
    for _ in range(n_tensors):
        name = r.take(r.u32()).decode("utf-8")
        rank = r.u32()
        shape = tuple(struct.unpack(f"<{rank}I", r.take(4 * rank)))
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(r.take(4 * count), dtype="<f4").reshape(shape)
        params[name] = arr.astype(np.float32)
    if r.pos != len(r.data):
        raise CheckpointError(f"{path}: {len(r.data) - r.pos} trailing bytes after tensors")
    expected = parameter_shapes(config)
    if set(params) != set(expected):
        raise CheckpointError(f"{path}: tensor names do not match the embedded model config")
    for name, arr in params.items():
        if arr.shape != expected[name]:
            raise CheckpointError(
                f"{path}: tensor {name} has shape {arr.shape}, config expects {expected[name]}"
            )
    params = {name: params[name] for name in expected}
    return Checkpoint(
        config=config,
        params=params,
        epochs_run=int(training["epochs_run"]),
        best_val_loss=float(training["best_val_loss"]),
        version=version,
    )
