"""Classical comparison denoisers: Savitzky-Golay and a spike/median smoother.

Both filters treat the two detector segments independently; no window ever
bridges the gap.  ``cotcat_like`` is a deliberately simplified spike-removal
plus moving-average pipeline that fills the role of a statistical smoothing
benchmark; it does not claim fidelity to any published tool.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, DataError
from .grid import WavelengthGrid
from .spectra import Spectrum


@dataclass(frozen=True)
class SGParams:
    window: int = 11
    poly_order: int = 3

    def __post_init__(self):
        if self.window < 3 or self.window % 2 == 0:
            raise ConfigError(f"SG window must be odd and >= 3, got {self.window}")
        if not 0 <= self.poly_order < self.window:
            raise ConfigError(
                f"SG poly_order must satisfy 0 <= order < window, got {self.poly_order}"
            )


@dataclass(frozen=True)
class CotcatLikeParams:
    spike_window: int = 7
    spike_threshold: float = 4.0
    smooth_window: int = 7
    iterations: int = 1

    def __post_init__(self):
        for name in ("spike_window", "smooth_window"):
            v = getattr(self, name)
            if v < 3 or v % 2 == 0:
                raise ConfigError(f"{name} must be odd and >= 3, got {v}")
        if self.spike_threshold <= 0:
            raise ConfigError("spike_threshold must be positive")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")


def sg_coefficients(p: SGParams) -> np.ndarray:
    """Convolution weights of the least-squares polynomial smoother.

    Solves the normal equations of an order-``poly_order`` fit over the
    window positions -h..h and returns the row that evaluates the fit at the
    window centre.  Weights sum to 1 (exact reproduction of constants).
    """
    h = p.window // 2
    x = np.arange(-h, h + 1, dtype=np.float64)
    a = np.vander(x, p.poly_order + 1, increasing=True)
    gram = a.T @ a
    m = np.linalg.solve(gram, a.T)
    return m[0]


def _fit_matrix(window: int, order: int) -> np.ndarray:
    """Projection matrix P with fitted values P @ y over one window."""
    x = np.arange(window, dtype=np.float64)
    a = np.vander(x, order + 1, increasing=True)
    return a @ np.linalg.solve(a.T @ a, a.T)


def sg_filter_values(values: np.ndarray, p: SGParams, grid: WavelengthGrid) -> np.ndarray:
    """Savitzky-Golay smoothing of a (..., n_channels) array, per segment.

    Interior channels use the centred convolution weights.  Within half a
    window of a segment edge the centred window would leave the segment, so
    those channels instead take the least-squares fit over the one-sided
    window anchored at that edge, evaluated at the channel position.  The
    same polynomial order is used everywhere, which keeps polynomials of
    degree <= poly_order exactly invariant.
    """
    values = np.asarray(values, dtype=np.float64)
    out = np.empty_like(values)
    h = p.window // 2
    c = sg_coefficients(p)
    fit = _fit_matrix(p.window, p.poly_order)
    for seg in grid.segment_slices:
        v = values[..., seg]
        n = v.shape[-1]
        if p.window > n:
            raise DataError(f"SG window {p.window} larger than segment of {n} channels")
        win = np.lib.stride_tricks.sliding_window_view(v, p.window, axis=-1)
        smoothed = np.empty_like(v)
        smoothed[..., h:n - h] = win @ c
        smoothed[..., :h] = v[..., :p.window] @ fit[:h].T
        smoothed[..., n - h:] = v[..., n - p.window:] @ fit[p.window - h:].T
        out[..., seg] = smoothed
    return out


def sg_filter(s: Spectrum, p: SGParams, grid: WavelengthGrid) -> Spectrum:
    return replace(s, values=sg_filter_values(s.values, p, grid))


def _sliding_median_and_mad(v: np.ndarray, window: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-position median and MAD over centred windows, truncated at edges."""
    n = v.shape[-1]
    h = window // 2
    med = np.empty_like(v)
    mad = np.empty_like(v)
    win = np.lib.stride_tricks.sliding_window_view(v, window, axis=-1)
    interior_med = np.median(win, axis=-1)
    med[..., h:n - h] = interior_med
    mad[..., h:n - h] = np.median(np.abs(win - interior_med[..., None]), axis=-1)
    for t in range(h):
        for pos, sl in ((t, slice(0, t + h + 1)), (n - 1 - t, slice(n - t - h - 1, n))):
            w = v[..., sl]
            m = np.median(w, axis=-1)
            med[..., pos] = m
            mad[..., pos] = np.median(np.abs(w - m[..., None]), axis=-1)
    return med, mad


def _moving_average(v: np.ndarray, window: int) -> np.ndarray:
    """Centred moving average with one-sided truncation at the edges."""
    n = v.shape[-1]
    h = window // 2
    csum = np.cumsum(v, axis=-1, dtype=np.float64)
    csum = np.concatenate([np.zeros(v.shape[:-1] + (1,)), csum], axis=-1)
    hi = np.minimum(np.arange(n) + h + 1, n)
    lo = np.maximum(np.arange(n) - h, 0)
    return (csum[..., hi] - csum[..., lo]) / (hi - lo)


def cotcat_like_values(
    values: np.ndarray, p: CotcatLikeParams, grid: WavelengthGrid
) -> np.ndarray:
    """Spike removal followed by moving-average smoothing, per segment.

    Per iteration: flag channels deviating from the local sliding median by
    more than ``spike_threshold`` times the window MAD and replace them with
    that median, then apply a centred moving average.
    """
    values = np.asarray(values, dtype=np.float64)
    out = np.empty_like(values)
    for seg in grid.segment_slices:
        v = np.array(values[..., seg])
        n = v.shape[-1]
        if p.spike_window > n or p.smooth_window > n:
            raise DataError("cotcat_like window larger than segment")
        for _ in range(p.iterations):
            med, mad = _sliding_median_and_mad(v, p.spike_window)
            spikes = np.abs(v - med) > p.spike_threshold * mad
            v = np.where(spikes, med, v)
            v = _moving_average(v, p.smooth_window)
        out[..., seg] = v
    return out


def cotcat_like(s: Spectrum, p: CotcatLikeParams, grid: WavelengthGrid) -> Spectrum:
    return replace(s, values=cotcat_like_values(s.values, p, grid))
