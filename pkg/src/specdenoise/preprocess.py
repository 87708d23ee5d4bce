"""Imputation of bad values and the composite synthetic noise injector.

Noise model: each channel receives ``g * (sigma_base + u)`` where ``g`` is
standard normal and ``u`` uniform on [0, sigma_uniform_max], independently
per channel and per call.  The uniform term jitters the per-channel noise
magnitude, which raises inter-channel variability without changing the zero
mean.  The composite variance has the closed form
``sigma_base^2 + sigma_base * a + a^2 / 3`` for ``a = sigma_uniform_max``.

Noisy values are deliberately not re-clamped to <= 1; clamping is a
separate, explicit option at the CLI layer.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, DataError
from .grid import WavelengthGrid, channel_range
from .spectra import Dataset, Spectrum

ARTIFACT_BAND_UM = (1.91, 2.08)


@dataclass(frozen=True)
class NoiseParams:
    """Composite Gaussian + uniform noise magnitudes, in I/F units."""

    sigma_base: float = 0.005
    sigma_uniform_max: float = 0.005
    seed: int = 0

    def __post_init__(self):
        if self.sigma_base < 0 or self.sigma_uniform_max < 0:
            raise ConfigError("noise magnitudes must be nonnegative")

    @property
    def variance(self) -> float:
        """Closed-form per-channel noise variance."""
        s, a = self.sigma_base, self.sigma_uniform_max
        return s * s + s * a + a * a / 3.0


def _impute_segment(values: np.ndarray, seg: slice) -> None:
    v = values[seg]
    bad = ~np.isfinite(v) | (v > 1.0)
    if not bad.any():
        return
    if bad.all():
        raise DataError(f"entire segment {seg.start}:{seg.stop} is bad, cannot impute")
    good_idx = np.flatnonzero(~bad)
    bad_idx = np.flatnonzero(bad)
    # np.interp holds the nearest good value across leading/trailing runs.
    v[bad_idx] = np.interp(bad_idx, good_idx, v[good_idx])


def impute_bad_values_array(values: np.ndarray, grid: WavelengthGrid) -> np.ndarray:
    """Vectorised bad-value imputation over a (..., n_channels) array."""
    values = np.array(values, dtype=np.float64)
    flat = values.reshape(-1, values.shape[-1])
    for row in flat:
        for seg in grid.segment_slices:
            _impute_segment(row, seg)
    return values


def impute_bad_values(s: Spectrum, grid: WavelengthGrid) -> Spectrum:
    """Replace channels with I/F > 1 or non-finite values.

    Bad channels take the linear interpolation, in channel index, between the
    nearest good channels of the same segment; bad runs touching a segment
    edge take the nearest good value.  Good channels pass through
    bit-unchanged.  Fails if a whole segment is bad.
    """
    return replace(s, values=impute_bad_values_array(s.values, grid))


def impute_artifact_band(
    s: Spectrum, grid: WavelengthGrid, band_um: tuple[float, float] = ARTIFACT_BAND_UM
) -> Spectrum:
    """Overwrite the atmospheric-artifact band with a linear bridge.

    Every channel inside the band is replaced by linear interpolation, in
    wavelength, between the last channel below the band and the first above
    it.  Channels outside the band are bit-unchanged.
    """
    return replace(s, values=impute_artifact_band_array(s.values, grid, band_um))


def impute_artifact_band_array(
    values: np.ndarray, grid: WavelengthGrid, band_um: tuple[float, float] = ARTIFACT_BAND_UM
) -> np.ndarray:
    values = np.array(values, dtype=np.float64)
    start, end = channel_range(grid, *band_um)
    if start == end:
        return values
    if start == 0 or end == grid.n_channels:
        raise DataError(f"artifact band {band_um} has no anchor channel on both sides")
    a, b = start - 1, end
    if grid.segment_of(a) != grid.segment_of(b):
        raise DataError(f"artifact band {band_um} spans the detector gap")
    lam = grid.wavelengths
    t = (lam[start:end] - lam[a]) / (lam[b] - lam[a])
    va = values[..., a, None]
    vb = values[..., b, None]
    values[..., start:end] = va + t * (vb - va)
    return values


def sample_noise(p: NoiseParams, size, rng: np.random.Generator) -> np.ndarray:
    """Draw composite noise: ``g * (sigma_base + u)``, elementwise independent."""
    g = rng.standard_normal(size)
    u = rng.uniform(0.0, p.sigma_uniform_max, size)
    return g * (p.sigma_base + u)


def add_noise(s: Spectrum, p: NoiseParams, rng: np.random.Generator) -> Spectrum:
    """Add one realisation of the composite noise to a spectrum."""
    return replace(s, values=s.values + sample_noise(p, s.values.shape, rng))


def add_noise_dataset(ds: Dataset, p: NoiseParams, clamp: bool = False) -> Dataset:
    """Noise every spectrum using its own ``[seed, id]`` stream.

    Per-spectrum streams keep the output independent of iteration order, so
    noisy datasets are reproducible from (dataset, params) alone.  ``clamp``
    optionally clips the noisy values back to (0, 1].
    """
    noisy = np.array(ds.values, dtype=np.float64)
    for row, sid in enumerate(ds.ids):
        rng = np.random.default_rng([p.seed, int(sid)])
        noisy[row] += sample_noise(p, noisy.shape[1], rng)
    if clamp:
        noisy = np.clip(noisy, 1e-6, 1.0)
    return ds.with_values(noisy)
