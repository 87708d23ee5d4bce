"""MSE loss, Adam, the training loop with early stopping, and inference."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DataError, NumericError
from .checkpoint import Checkpoint
from .unet import UNet1D


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 256
    max_epochs: int = 100
    early_stop_patience: int = 5
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        if min(self.learning_rate, self.batch_size, self.max_epochs,
               self.early_stop_patience, self.adam_eps) <= 0:
            raise ConfigError("all training parameters must be positive")
        if not (0 < self.adam_beta1 < 1 and 0 < self.adam_beta2 < 1):
            raise ConfigError("Adam betas must lie in (0, 1)")
        if self.early_stop_patience > self.max_epochs:
            raise ConfigError("early_stop_patience must not exceed max_epochs")

    def to_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "max_epochs": self.max_epochs,
            "early_stop_patience": self.early_stop_patience,
            "adam_beta1": self.adam_beta1,
            "adam_beta2": self.adam_beta2,
            "adam_eps": self.adam_eps,
        }


def mse_loss(pred: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean over all elements of squared error, plus the gradient w.r.t. pred."""
    if pred.shape != target.shape:
        raise DataError(f"shape mismatch {pred.shape} vs {target.shape}")
    diff = pred - target
    loss = float(np.mean(diff.astype(np.float64) ** 2))
    grad = (2.0 / diff.size) * diff
    return loss, grad


@dataclass
class AdamState:
    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]


def init_adam_state(params: dict[str, np.ndarray]) -> AdamState:
    return AdamState(
        m={n: np.zeros_like(p) for n, p in params.items()},
        v={n: np.zeros_like(p) for n, p in params.items()},
    )


def adam_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: AdamState,
    t: int,
    cfg: TrainConfig,
) -> tuple[dict[str, np.ndarray], AdamState]:
    """One Adam update with bias correction; mutates params and state in place."""
    if t < 1:
        raise ValueError(f"Adam step index must be >= 1, got {t}")
    b1, b2 = cfg.adam_beta1, cfg.adam_beta2
    c1 = 1.0 - b1**t
    c2 = 1.0 - b2**t
    for name, p in params.items():
        g = grads[name]
        m = state.m[name]
        v = state.v[name]
        m *= b1
        m += (1 - b1) * g
        v *= b2
        v += (1 - b2) * np.square(g)
        p -= (cfg.learning_rate * (m / c1) / (np.sqrt(v / c2) + cfg.adam_eps)).astype(p.dtype)
    return params, state


class EarlyStopper:
    """Stop after ``patience`` consecutive epochs without a strict improvement."""

    def __init__(self, patience: int):
        if patience < 1:
            raise ValueError("patience must be >= 1")
        self.patience = patience
        self.best = np.inf
        self.best_epoch = 0
        self.epochs_seen = 0
        self._streak = 0

    def update(self, val_loss: float) -> bool:
        """Record one epoch's validation loss; True means stop now."""
        self.epochs_seen += 1
        if val_loss < self.best:
            self.best = val_loss
            self.best_epoch = self.epochs_seen
            self._streak = 0
        else:
            self._streak += 1
        return self._streak >= self.patience


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_mse: float
    val_mse: float


def reflect_pad(values: np.ndarray, pad_to: int) -> np.ndarray:
    """Reflect-pad (n, L) spectra to (n, 1, pad_to)."""
    values = np.atleast_2d(values)
    diff = pad_to - values.shape[1]
    if diff < 0 or diff % 2 != 0:
        raise DataError(f"cannot pad length {values.shape[1]} to {pad_to}")
    left = diff // 2
    padded = np.pad(values, ((0, 0), (left, diff - left)), mode="reflect") if diff else values
    return padded[:, None, :]


def _dataset_mse(model: UNet1D, x: np.ndarray, target: np.ndarray, batch_size: int) -> float:
    total = 0.0
    for i in range(0, x.shape[0], batch_size):
        pred = model.forward(x[i:i + batch_size])
        d = (pred - target[i:i + batch_size]).astype(np.float64)
        total += float(np.sum(d * d))
    return total / x.size


def train(
    model: UNet1D,
    train_pairs: tuple[np.ndarray, np.ndarray],
    val_pairs: tuple[np.ndarray, np.ndarray],
    cfg: TrainConfig,
    shuffle_seed: int = 0,
    start_epoch: int = 0,
    log=None,
) -> tuple[Checkpoint, list[EpochRecord]]:
    """Minimise MSE of (noisy input -> low-noise target) pairs.

    Shuffles with a seeded generator each epoch, tracks validation MSE, and
    stops once validation has not improved for ``early_stop_patience``
    epochs (or at ``max_epochs``).  The returned checkpoint holds the
    parameters of the best validation epoch.  ``start_epoch`` offsets epoch
    numbering when resuming from a previous checkpoint.
    """
    noisy, clean = train_pairs
    if noisy.shape != clean.shape or noisy.ndim != 2 or noisy.shape[0] == 0:
        raise DataError(f"bad training pair shapes: {noisy.shape} vs {clean.shape}")
    dtype = model.config.np_dtype
    x = reflect_pad(noisy, model.config.pad_to).astype(dtype)
    y = reflect_pad(clean, model.config.pad_to).astype(dtype)
    vx = reflect_pad(val_pairs[0], model.config.pad_to).astype(dtype)
    vy = reflect_pad(val_pairs[1], model.config.pad_to).astype(dtype)

    rng = np.random.default_rng(shuffle_seed)
    state = init_adam_state(model.params)
    stopper = EarlyStopper(cfg.early_stop_patience)
    best_params = {n: p.copy() for n, p in model.params.items()}
    best_val = np.inf
    history: list[EpochRecord] = []
    t = 0
    n = x.shape[0]
    for epoch in range(start_epoch + 1, start_epoch + cfg.max_epochs + 1):
        perm = rng.permutation(n)
        sq_sum = 0.0
        for i in range(0, n, cfg.batch_size):
            batch = perm[i:i + cfg.batch_size]
            pred, cache = model.forward_with_cache(x[batch])
            loss, grad = mse_loss(pred, y[batch])
            if not np.isfinite(loss):
                raise NumericError(f"non-finite training loss at epoch {epoch}, batch {i // cfg.batch_size}")
            sq_sum += loss * pred.size
            grads = model.backward(cache, grad)
            t += 1
            adam_step(model.params, grads, state, t, cfg)
        train_mse = sq_sum / x.size
        val_mse = _dataset_mse(model, vx, vy, cfg.batch_size)
        if not np.isfinite(val_mse):
            raise NumericError(f"non-finite validation loss at epoch {epoch}")
        history.append(EpochRecord(epoch, train_mse, val_mse))
        if log is not None:
            log(f"epoch {epoch}: train_mse={train_mse:.6e} val_mse={val_mse:.6e}")
        if val_mse < best_val:
            best_val = val_mse
            best_params = {n_: p.copy() for n_, p in model.params.items()}
        if stopper.update(val_mse):
            break
    model.params = best_params
    ckpt = Checkpoint(
        config=model.config,
        params={n_: p.copy() for n_, p in best_params.items()},
        epochs_run=history[-1].epoch if history else start_epoch,
        best_val_loss=float(best_val),
    )
    return ckpt, history


def denoise_values(model_or_checkpoint, values: np.ndarray, batch_size: int = 256) -> np.ndarray:
    """Denoise (n, in_length) spectra: reflect-pad, forward pass, crop back.

    Deterministic: a fixed chunk size makes repeated calls (and calls before
    and after a checkpoint round trip) bit-identical.
    """
    model = (
        model_or_checkpoint
        if isinstance(model_or_checkpoint, UNet1D)
        else UNet1D(model_or_checkpoint.config, model_or_checkpoint.params)
    )
    cfg = model.config
    values = np.atleast_2d(np.asarray(values))
    if values.shape[1] != cfg.in_length:
        raise DataError(f"expected spectra of length {cfg.in_length}, got {values.shape[1]}")
    x = reflect_pad(values, cfg.pad_to).astype(cfg.np_dtype)
    left = (cfg.pad_to - cfg.in_length) // 2
    out = np.empty((values.shape[0], cfg.in_length), dtype=np.float64)
    for i in range(0, x.shape[0], batch_size):
        pred = model.forward(x[i:i + batch_size])
        out[i:i + batch_size] = pred[:, 0, left:left + cfg.in_length].astype(np.float64)
    return out
