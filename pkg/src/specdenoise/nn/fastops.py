"""Channels-last execution kernels for the model's forward/backward passes.

Activations here are (batch, length, channels): the im2col matrix then
assembles from contiguous chunk copies and every contraction is a single
large GEMM in its fastest orientation.  These kernels compute exactly the
same functions as the reference ops in :mod:`specdenoise.nn.layers` (the
equivalence is pinned by tests); the reference ops define the contract,
this module only exists because training time is dominated by convolutions.
"""

from __future__ import annotations

import numpy as np


def pad_length(x: np.ndarray, left: int, right: int) -> np.ndarray:
    """Zero-pad along the length axis of a (batch, length, channels) array."""
    if left == 0 and right == 0:
        return x
    n, length, c = x.shape
    out = np.zeros((n, length + left + right, c), dtype=x.dtype)
    out[:, left:left + length] = x
    return out


def im2col(xp: np.ndarray, k: int) -> tuple[np.ndarray, int]:
    """(batch, Lp, C) -> (batch*T, k*C) window matrix, T = Lp - k + 1.

    In channels-last layout each window's (k, C) block is one contiguous
    span of memory, so the overlapping strided view copies in large chunks.
    """
    if not xp.flags.c_contiguous:
        xp = np.ascontiguousarray(xp)
    n, lp, c = xp.shape
    t = lp - k + 1
    view = np.lib.stride_tricks.as_strided(xp, shape=(n, t, k * c), strides=xp.strides)
    return np.ascontiguousarray(view).reshape(n * t, k * c), t


def conv_weight_matrix(w: np.ndarray) -> np.ndarray:
    """(O, C, k) conv weights -> (k*C, O) matrix matching im2col columns."""
    return np.ascontiguousarray(w.transpose(2, 1, 0).reshape(-1, w.shape[0]))


def conv_weight_from_matrix(g2: np.ndarray, out_c: int, in_c: int, k: int) -> np.ndarray:
    return np.ascontiguousarray(g2.reshape(k, in_c, out_c).transpose(2, 1, 0))


def conv_same(x: np.ndarray, w: np.ndarray, bias: np.ndarray):
    """Same-length convolution; returns output plus the cached window matrix."""
    out_c, in_c, k = w.shape
    pad = (k - 1) // 2
    b_mat, t = im2col(pad_length(x, pad, pad), k)
    y = b_mat @ conv_weight_matrix(w)
    y += bias
    return y.reshape(x.shape[0], t, out_c), b_mat


def conv_same_backward(grad_y: np.ndarray, b_mat: np.ndarray, w: np.ndarray):
    """Gradients of conv_same w.r.t. (x, w, bias); grad_y is (batch, T, O)."""
    out_c, in_c, k = w.shape
    n, t, _ = grad_y.shape
    pad = (k - 1) // 2
    gy2 = grad_y.reshape(n * t, out_c)
    gw = conv_weight_from_matrix(b_mat.T @ gy2, out_c, in_c, k)
    gb = gy2.sum(axis=0)
    # d/dx is a full correlation with the flipped, in/out-transposed kernel.
    wt = np.ascontiguousarray(w[:, :, ::-1].transpose(1, 0, 2))  # (C, O, k)
    b_full, t_full = im2col(pad_length(grad_y, k - 1, k - 1), k)
    gx_full = (b_full @ conv_weight_matrix(wt)).reshape(n, t_full, in_c)
    return gx_full[:, pad:pad + t], gw, gb


def tconv_weight_matrix(w: np.ndarray) -> np.ndarray:
    """(Cin, O, k) transposed-conv weights -> (k*Cin, O), kernel flipped."""
    return np.ascontiguousarray(w[:, :, ::-1].transpose(2, 0, 1).reshape(-1, w.shape[1]))


def tconv_double(x: np.ndarray, w: np.ndarray, bias: np.ndarray,
                 stride: int = 2, padding: int = 2, output_padding: int = 1):
    """Transposed convolution that doubles the length at the defaults."""
    in_c, out_c, k = w.shape
    n, length, _ = x.shape
    z = np.zeros((n, (length - 1) * stride + 1, in_c), dtype=x.dtype)
    z[:, ::stride] = x
    zp = pad_length(z, k - 1 - padding, k - 1 - padding + output_padding)
    b_mat, t = im2col(zp, k)
    y = b_mat @ tconv_weight_matrix(w)
    y += bias
    return y.reshape(n, t, out_c), b_mat


def tconv_double_backward(grad_y: np.ndarray, b_mat: np.ndarray, w: np.ndarray,
                          in_length: int, stride: int = 2, padding: int = 2,
                          output_padding: int = 1):
    in_c, out_c, k = w.shape
    n, t, _ = grad_y.shape
    gy2 = grad_y.reshape(n * t, out_c)
    gwf = (b_mat.T @ gy2).reshape(k, in_c, out_c)
    gw = np.ascontiguousarray(gwf[::-1].transpose(1, 2, 0))
    gb = gy2.sum(axis=0)
    # d/d(zp) is a full correlation with w viewed as (out=Cin, in=O, k).
    w2b = np.ascontiguousarray(w.transpose(2, 1, 0).reshape(k * out_c, in_c))
    b_full, _ = im2col(pad_length(grad_y, k - 1, k - 1), k)
    gzp = (b_full @ w2b).reshape(n, t + k - 1, in_c)
    left = k - 1 - padding
    stuffed = (in_length - 1) * stride + 1
    return gzp[:, left:left + stuffed:stride], gw, gb


def maxpool(x: np.ndarray, window: int = 2):
    """Non-overlapping max pool along the length axis; first-occurrence ties."""
    n, length, c = x.shape
    r = x.reshape(n, length // window, window, c)
    if window == 2:
        # argmax with first-occurrence ties is just "second strictly larger"
        local = (r[:, :, 1, :] > r[:, :, 0, :]).astype(np.int64)
        y = np.where(local == 1, r[:, :, 1, :], r[:, :, 0, :])
        return y, local
    local = r.argmax(axis=2)
    y = np.take_along_axis(r, local[:, :, None, :], axis=2)[:, :, 0, :]
    return np.ascontiguousarray(y), local


def maxpool_backward(grad_y: np.ndarray, local: np.ndarray, window: int = 2):
    n, t, c = grad_y.shape
    gx = np.zeros((n, t, window, c), dtype=grad_y.dtype)
    np.put_along_axis(gx, local[:, :, None, :], grad_y[:, :, None, :], axis=2)
    return gx.reshape(n, t * window, c)
