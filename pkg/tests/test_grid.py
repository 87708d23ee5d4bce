import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specdenoise import N_CHANNELS, WavelengthGrid, build_default_grid, channel_range
from specdenoise.grid import SEGMENT_1_CHANNELS, SEGMENT_1_RANGE_UM, SEGMENT_2_RANGE_UM


def test_default_grid_endpoints(grid):
    assert grid.wavelengths[0] == pytest.approx(1.0210, abs=1e-12)
    assert grid.wavelengths[349] == pytest.approx(3.4769, abs=1e-12)
    assert grid.wavelengths[SEGMENT_1_CHANNELS - 1] == pytest.approx(2.6483, abs=1e-12)
    assert grid.wavelengths[SEGMENT_1_CHANNELS] == pytest.approx(2.8070, abs=1e-12)
    assert grid.segment_break == 248


def test_default_grid_spacing(grid):
    # Uniform spacing within each segment, derived from endpoints and counts.
    expected_1 = (SEGMENT_1_RANGE_UM[1] - SEGMENT_1_RANGE_UM[0]) / (SEGMENT_1_CHANNELS - 1)
    assert grid.wavelengths[1] - grid.wavelengths[0] == pytest.approx(expected_1, rel=1e-12)
    assert expected_1 == pytest.approx(6.5883e-3, rel=1e-4)
    d1 = np.diff(grid.wavelengths[:248])
    d2 = np.diff(grid.wavelengths[248:])
    assert np.allclose(d1, d1[0], rtol=1e-9)
    assert np.allclose(d2, d2[0], rtol=1e-9)


def test_default_grid_gap(grid):
    assert grid.wavelengths[248] - grid.wavelengths[247] > 0.1


def test_default_grid_deterministic():
    a = build_default_grid()
    b = build_default_grid()
    assert a.wavelengths.tobytes() == b.wavelengths.tobytes()
    assert a.segment_break == b.segment_break


def test_grid_arrays_read_only(grid):
    with pytest.raises(ValueError):
        grid.wavelengths[0] = 0.0


def test_grid_rejects_bad_shapes():
    with pytest.raises(ValueError):
        WavelengthGrid(np.linspace(1.0, 3.5, 100), 50)
    w = build_default_grid().wavelengths.copy()
    w[5], w[6] = w[6], w[5]
    with pytest.raises(ValueError):
        WavelengthGrid(w, 248)


def test_channel_range_single_endpoint(grid):
    assert channel_range(grid, 1.0210, 1.0210) == (0, 1)


def test_channel_range_outside_grid_is_empty(grid):
    start, end = channel_range(grid, 5.0, 6.0)
    assert start == end


def test_channel_range_whole_grid(grid):
    assert channel_range(grid, 1.0, 3.5) == (0, 350)


def test_channel_range_artifact_band_scan(grid):
    # Oracle: scan every channel for membership in [1.91, 2.08].
    lo, hi = 1.91, 2.08
    start, end = channel_range(grid, lo, hi)
    inside = np.flatnonzero((grid.wavelengths >= lo) & (grid.wavelengths <= hi))
    assert start == inside[0]
    assert end == inside[-1] + 1
    assert np.all(grid.wavelengths[start:end] >= lo)
    assert np.all(grid.wavelengths[start:end] <= hi)
    assert grid.wavelengths[start - 1] < lo
    assert grid.wavelengths[end] > hi


def test_channel_range_rejects_inverted(grid):
    with pytest.raises(ValueError):
        channel_range(grid, 2.0, 1.0)


@settings(max_examples=200, deadline=None)
@given(
    lo=st.floats(0.5, 4.0),
    hi=st.floats(0.5, 4.0),
    grow_lo=st.floats(0.0, 0.5),
    grow_hi=st.floats(0.0, 0.5),
)
def test_channel_range_monotone(lo, hi, grow_lo, grow_hi):
    grid = build_default_grid()
    if lo > hi:
        lo, hi = hi, lo
    s1, e1 = channel_range(grid, lo, hi)
    s2, e2 = channel_range(grid, lo - grow_lo, hi + grow_hi)
    assert s2 <= s1
    assert e2 >= e1
    assert e1 - s1 >= 0


def test_segment_of_and_nearest_channel(grid):
    assert grid.segment_of(0) == 0
    assert grid.segment_of(247) == 0
    assert grid.segment_of(248) == 1
    assert grid.nearest_channel(1.0210) == 0
    assert grid.nearest_channel(3.4769) == N_CHANNELS - 1
    # A wavelength in the gap snaps to one of the segment-edge channels.
    assert grid.nearest_channel(2.72) in (247, 248)
