"""Two-segment SWIR wavelength axis and channel lookup helpers.

The fixed spectral layout used throughout the package is a 350-channel axis
split into two detector segments with a gap between them.  All wavelengths
are in micrometres.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SEGMENT_1_RANGE_UM = (1.0210, 2.6483)
SEGMENT_2_RANGE_UM = (2.8070, 3.4769)

# The 248/102 split keeps the channel spacing of both segments at roughly
# 6.6 nm.  Only the total channel count and the segment endpoints are fixed
# by the instrument layout; the per-segment counts live here as the single
# authoritative constant.
SEGMENT_1_CHANNELS = 248
SEGMENT_2_CHANNELS = 102
N_CHANNELS = SEGMENT_1_CHANNELS + SEGMENT_2_CHANNELS

# Minimum wavelength gap between the two segments.
MIN_SEGMENT_GAP_UM = 0.1

_ENDPOINT_ATOL = 1e-9


@dataclass(frozen=True)
class WavelengthGrid:
    """Immutable 350-channel wavelength axis.

    Attributes:
        wavelengths: array of 350 wavelengths in um, strictly increasing
            within each segment.
        segment_break: index of the first channel of segment 2.
    """

    wavelengths: np.ndarray
    segment_break: int

    def __post_init__(self):
        w = np.array(self.wavelengths, dtype=np.float64)
        if w.ndim != 1 or w.size != N_CHANNELS:
            raise ValueError(f"grid must have exactly {N_CHANNELS} channels, got shape {w.shape}")
        b = int(self.segment_break)
        if not 0 < b < N_CHANNELS:
            raise ValueError(f"segment_break {b} outside (0, {N_CHANNELS})")
        seg1, seg2 = w[:b], w[b:]
        for name, seg in (("segment 1", seg1), ("segment 2", seg2)):
            if np.any(np.diff(seg) <= 0):
                raise ValueError(f"{name} wavelengths are not strictly increasing")
        for name, seg, (lo, hi) in (
            ("segment 1", seg1, SEGMENT_1_RANGE_UM),
            ("segment 2", seg2, SEGMENT_2_RANGE_UM),
        ):
            if abs(seg[0] - lo) > _ENDPOINT_ATOL or abs(seg[-1] - hi) > _ENDPOINT_ATOL:
                raise ValueError(
                    f"{name} must span [{lo}, {hi}] um, got [{seg[0]}, {seg[-1]}]"
                )
        if seg2[0] - seg1[-1] <= MIN_SEGMENT_GAP_UM:
            raise ValueError(
                f"segment gap {seg2[0] - seg1[-1]:.6f} um not greater than {MIN_SEGMENT_GAP_UM}"
            )
        w.flags.writeable = False
        object.__setattr__(self, "wavelengths", w)
        object.__setattr__(self, "segment_break", b)

    @property
    def n_channels(self) -> int:
        return int(self.wavelengths.size)

    @property
    def segment_slices(self) -> tuple[slice, slice]:
        """Channel slices of the two detector segments."""
        return slice(0, self.segment_break), slice(self.segment_break, self.n_channels)

    def segment_of(self, channel: int) -> int:
        """Return 0 or 1 depending on which segment the channel lies in."""
        if not 0 <= channel < self.n_channels:
            raise ValueError(f"channel {channel} outside [0, {self.n_channels})")
        return 0 if channel < self.segment_break else 1

    def nearest_channel(self, wavelength_um: float) -> int:
        """Index of the channel whose wavelength is closest to the target."""
        return int(np.argmin(np.abs(self.wavelengths - wavelength_um)))


def build_default_grid() -> WavelengthGrid:
    """Construct the default grid: 248 + 102 uniformly spaced channels.

    Deterministic; repeated calls return bit-identical wavelength arrays.
    """
    seg1 = np.linspace(*SEGMENT_1_RANGE_UM, SEGMENT_1_CHANNELS)
    seg2 = np.linspace(*SEGMENT_2_RANGE_UM, SEGMENT_2_CHANNELS)
    return WavelengthGrid(np.concatenate([seg1, seg2]), SEGMENT_1_CHANNELS)


def channel_range(grid: WavelengthGrid, lo_um: float, hi_um: float) -> tuple[int, int]:
    """Half-open index range of channels with ``lo_um <= wavelength <= hi_um``.

    ``lo_um == hi_um`` selects the single channel at that exact wavelength if
    one exists.  Ranges that cover no channel come back empty
    (``start == end``); enlarging the interval never shrinks the result.
    """
    if lo_um > hi_um:
        raise ValueError(f"lo {lo_um} > hi {hi_um}")
    w = grid.wavelengths
    start = int(np.searchsorted(w, lo_um, side="left"))
    end = int(np.searchsorted(w, hi_um, side="right"))
    return start, max(start, end)
