"""Layer primitives with explicit forward and backward passes.

Arrays follow the (batch, channels, length) convention, C-contiguous.  All
convolutions are implemented as windowed tensor contractions so the heavy
lifting lands in BLAS; gradients are exact (validated against central finite
differences in the test suite).
"""

from __future__ import annotations

import numpy as np


def _check_3d(x: np.ndarray, name: str) -> None:
    if x.ndim != 3:
        raise ValueError(f"{name} must be (batch, channels, length), got shape {x.shape}")


def _pad_last(x: np.ndarray, left: int, right: int) -> np.ndarray:
    if left == 0 and right == 0:
        return x
    return np.pad(x, ((0, 0), (0, 0), (left, right)))


def _corr(xp: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Stride-1 valid correlation: y[n,o,t] = sum_{i,j} w[o,i,j] * xp[n,i,t+j]."""
    k = w.shape[2]
    windows = np.lib.stride_tricks.sliding_window_view(xp, k, axis=2)
    y = np.tensordot(windows, w, axes=([1, 3], [1, 2]))
    return np.ascontiguousarray(y.transpose(0, 2, 1))


def conv1d(x: np.ndarray, w: np.ndarray, b: np.ndarray, padding: int | None = None) -> np.ndarray:
    """Same-length 1D convolution (correlation form) with zero padding.

    ``w`` has shape (out_channels, in_channels, k) with k odd; padding is
    fixed at (k-1)/2 so the output length equals the input length.
    """
    _check_3d(x, "x")
    out_c, in_c, k = w.shape
    if k % 2 == 0:
        raise ValueError(f"kernel size must be odd, got {k}")
    if x.shape[1] != in_c:
        raise ValueError(f"x has {x.shape[1]} channels, weights expect {in_c}")
    if b.shape != (out_c,):
        raise ValueError(f"bias shape {b.shape} != ({out_c},)")
    pad = (k - 1) // 2
    if padding is not None and padding != pad:
        raise ValueError(f"padding must be (k-1)/2 = {pad}, got {padding}")
    y = _corr(_pad_last(x, pad, pad), w)
    y += b.reshape(1, -1, 1)
    return y


def conv1d_backward(
    grad_y: np.ndarray, x: np.ndarray, w: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact gradients of :func:`conv1d` w.r.t. input, weights and bias."""
    _check_3d(grad_y, "grad_y")
    _check_3d(x, "x")
    out_c, in_c, k = w.shape
    if grad_y.shape != (x.shape[0], out_c, x.shape[2]):
        raise ValueError(f"grad_y shape {grad_y.shape} inconsistent with forward")
    pad = (k - 1) // 2
    xp = _pad_last(x, pad, pad)
    windows = np.lib.stride_tricks.sliding_window_view(xp, k, axis=2)
    grad_w = np.tensordot(grad_y, windows, axes=([0, 2], [0, 2]))
    grad_b = grad_y.sum(axis=(0, 2))
    # Gradient w.r.t. x is a full correlation with the flipped, transposed kernel.
    w_t = np.ascontiguousarray(w[:, :, ::-1].transpose(1, 0, 2))
    full = _corr(_pad_last(grad_y, k - 1, k - 1), w_t)
    grad_x = full[:, :, pad:pad + x.shape[2]]
    return np.ascontiguousarray(grad_x), grad_w, grad_b


def _zero_stuff(x: np.ndarray, stride: int) -> np.ndarray:
    """Insert stride-1 zeros between consecutive samples along the last axis."""
    n, c, length = x.shape
    z = np.zeros((n, c, (length - 1) * stride + 1), dtype=x.dtype)
    z[:, :, ::stride] = x
    return z


def transposed_conv1d(
    x: np.ndarray,
    w: np.ndarray,
    b: np.ndarray,
    stride: int = 2,
    padding: int = 2,
    output_padding: int = 1,
) -> np.ndarray:
    """Fractionally-strided convolution; doubles the length at the defaults.

    ``w`` has shape (in_channels, out_channels, k).  Semantics: insert
    ``stride - 1`` zeros between input samples, convolve (true convolution,
    i.e. with the kernel flipped), then trim ``padding`` from the left and
    ``k - 1 - padding - output_padding`` from the right.  Output length is
    ``(L - 1) * stride - 2 * padding + k + output_padding``.
    """
    _check_3d(x, "x")
    in_c, out_c, k = w.shape
    if x.shape[1] != in_c:
        raise ValueError(f"x has {x.shape[1]} channels, weights expect {in_c}")
    if b.shape != (out_c,):
        raise ValueError(f"bias shape {b.shape} != ({out_c},)")
    left = k - 1 - padding
    right = k - 1 - padding + output_padding
    if left < 0 or right < 0:
        raise ValueError(f"padding {padding} too large for kernel {k}")
    zp = _pad_last(_zero_stuff(x, stride), left, right)
    w_flip = np.ascontiguousarray(w[:, :, ::-1].transpose(1, 0, 2))
    y = _corr(zp, w_flip)
    y += b.reshape(1, -1, 1)
    return y


def transposed_conv1d_backward(
    grad_y: np.ndarray,
    x: np.ndarray,
    w: np.ndarray,
    stride: int = 2,
    padding: int = 2,
    output_padding: int = 1,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact gradients of :func:`transposed_conv1d`."""
    _check_3d(grad_y, "grad_y")
    in_c, out_c, k = w.shape
    left = k - 1 - padding
    right = k - 1 - padding + output_padding
    zp = _pad_last(_zero_stuff(x, stride), left, right)
    windows = np.lib.stride_tricks.sliding_window_view(zp, k, axis=2)
    grad_w_flip = np.tensordot(grad_y, windows, axes=([0, 2], [0, 2]))
    grad_w = np.ascontiguousarray(grad_w_flip[:, :, ::-1].transpose(1, 0, 2))
    grad_b = grad_y.sum(axis=(0, 2))
    # d/d(zp) of a valid correlation is a full correlation with w itself
    # viewed as (out=in_c, in=out_c, k); then drop padding and stuffing.
    grad_zp = _corr(_pad_last(grad_y, k - 1, k - 1), w)
    stuffed_len = (x.shape[2] - 1) * stride + 1
    grad_z = grad_zp[:, :, left:left + stuffed_len]
    grad_x = grad_z[:, :, ::stride]
    return np.ascontiguousarray(grad_x), grad_w, grad_b


def maxpool1d(x: np.ndarray, window: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Non-overlapping max pooling (stride equals window).

    Returns the pooled values and the argmax positions in original-length
    coordinates; ties go to the first occurrence in the window.
    """
    _check_3d(x, "x")
    n, c, length = x.shape
    if length % window != 0:
        raise ValueError(f"length {length} not divisible by pooling window {window}")
    r = x.reshape(n, c, length // window, window)
    local = r.argmax(axis=3)
    y = np.take_along_axis(r, local[..., None], axis=3)[..., 0]
    idx = local + window * np.arange(length // window)
    return np.ascontiguousarray(y), idx


def maxpool1d_backward(grad_y: np.ndarray, idx: np.ndarray, input_length: int) -> np.ndarray:
    """Route gradients to the argmax positions only."""
    n, c, _ = grad_y.shape
    grad_x = np.zeros((n, c, input_length), dtype=grad_y.dtype)
    np.put_along_axis(grad_x, idx, grad_y, axis=2)
    return grad_x


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0)


def relu_backward(grad_y: np.ndarray, x: np.ndarray) -> np.ndarray:
    # Subgradient 0 at exactly 0.
    return grad_y * (x > 0)
