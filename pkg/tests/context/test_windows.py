"""Window tiling, membership and masking unit tests."""

import numpy as np
import pytest

from app.context.windows import (
    assign_members,
    build_index,
    build_windows,
    select_masks,
    window_members,
)
from app.schemas.context import SpatialWindow


def test_windows_tile_the_extent():
    """Test a 1000 m extent with 500 m windows and 250 m stride gives 3x3 windows."""
    windows = build_windows((0.0, 0.0, 1000.0, 1000.0), 500.0, 250.0)
    assert len(windows) == 9
    assert windows[0].bounds == (0.0, 0.0, 500.0, 500.0)
    assert windows[1].bounds == (250.0, 0.0, 750.0, 500.0)
    assert windows[-1].bounds == (500.0, 500.0, 1000.0, 1000.0)
    assert [w.index for w in windows] == list(range(9))


def test_window_larger_than_extent():
    """Test an extent smaller than the window still gets one window."""
    windows = build_windows((0.0, 0.0, 50.0, 50.0), 500.0, 250.0)
    assert len(windows) == 1


@pytest.mark.parametrize("size, stride", [(0.0, 1.0), (10.0, 20.0), (10.0, 0.0)])
def test_invalid_window_geometry(size, stride):
    """Test non-positive sizes and strides beyond the size are rejected."""
    with pytest.raises(ValueError):
        build_windows((0.0, 0.0, 100.0, 100.0), size, stride)


def test_window_members(small_dataset):
    """Test members are entities touching the window."""
    index = build_index(small_dataset.entities, 25.0)
    window = SpatialWindow(index=0, bounds=(0.0, 0.0, 25.0, 25.0))
    assert window_members(window, small_dataset, index, cap=10) == (1, 2, 3)


def test_window_members_cap_keeps_nearest(small_dataset):
    """Test the cap keeps the members nearest the window center."""
    index = build_index(small_dataset.entities, 25.0)
    window = SpatialWindow(index=0, bounds=(0.0, 0.0, 25.0, 25.0))
    assert window_members(window, small_dataset, index, cap=2) == (2, 3)


def test_assign_members(small_dataset):
    """Test member lists are resolved for every window."""
    windows = build_windows(small_dataset.extent, 25.0, 25.0)
    resolved = assign_members(windows, small_dataset, cap=10)
    assert len(resolved) == 4
    assert resolved[0].members == (1, 2, 3)
    assert 4 in resolved[-1].members
    assert assign_members([], small_dataset, cap=10) == []


def test_select_masks_count():
    """Test floor(ratio * n) members are masked, at least one."""
    rng = np.random.default_rng(0)
    masked = select_masks(tuple(range(10)), 0.3, rng)
    assert len(masked) == 3
    assert list(masked) == sorted(set(masked))
    assert len(select_masks((4, 7), 0.3, rng)) == 1


def test_select_masks_single_member():
    """Test a lone member is never masked."""
    assert select_masks((5,), 0.5, np.random.default_rng(0)) == ()


def test_select_masks_invalid_ratio():
    """Test the ratio must lie strictly between 0 and 1."""
    with pytest.raises(ValueError):
        select_masks((1, 2, 3), 1.0, np.random.default_rng(0))
