#!/usr/bin/env python3
"""Walk through the spectral data model: the two-segment wavelength grid,
channel lookups, and spectrum validation."""

import numpy as np

from specdenoise import (
    Spectrum,
    build_default_grid,
    channel_range,
    validate_spectrum,
)

grid = build_default_grid()

print("The 350-channel grid covers two detector segments (um):")
seg1, seg2 = grid.segment_slices
print(f"  segment 1: channels {seg1.start:3d}..{seg1.stop - 1}  "
      f"{grid.wavelengths[seg1][0]:.4f} .. {grid.wavelengths[seg1][-1]:.4f}")
print(f"  segment 2: channels {seg2.start:3d}..{seg2.stop - 1}  "
      f"{grid.wavelengths[seg2][0]:.4f} .. {grid.wavelengths[seg2][-1]:.4f}")
print(f"  detector gap: {grid.wavelengths[248] - grid.wavelengths[247]:.4f} um")
print(f"  channel spacing: {grid.wavelengths[1] - grid.wavelengths[0] :.6f} um (segment 1)")

lo, hi = 1.91, 2.08
start, end = channel_range(grid, lo, hi)
print(f"\nThe volcano-scan artifact band [{lo}, {hi}] um spans channels "
      f"[{start}, {end}): {end - start} channels")

print("\nSpectrum validation flags out-of-range and non-finite channels:")
values = np.full(350, 0.31)
values[7] = 1.3          # bad I/F
values[100] = np.nan     # non-finite
spectrum = Spectrum(values, label=1, group_id=0)
for v in validate_spectrum(spectrum, grid):
    print(f"  channel {v.channel}: rule {v.rule!r}")

clean = Spectrum(np.full(350, 0.31), label=1, group_id=0)
print(f"well-formed spectrum violations: {validate_spectrum(clean, grid)}")
