import numpy as np
import pytest

from stereoqa.disparity import (
    DisparityConfig,
    DisparityMap,
    depth_bracket,
    disparity_to_depth,
    estimate_disparity,
    estimate_disparity_series,
)
from stereoqa.errors import ParamError
from stereoqa.media import Frame, StereoFrame
from stereoqa.rng import SeededRng
from stereoqa.saliency import SaliencyMap

from conftest import make_seq


def _pair_with_shift(shift, size=64, seed=31):
    """Right view equals left shifted right-to-left by `shift` columns, so the
    block matcher should report disparity = shift away from the seam."""
    rng = SeededRng(seed)
    left = rng.uniform(size * size).reshape(size, size) * 255.0
    right = np.empty_like(left)
    right[:, :size - shift] = left[:, shift:]
    right[:, size - shift:] = left[:, size - shift:]
    return StereoFrame(left=Frame(luma=left), right=Frame(luma=right), index=0)


def test_known_shift_recovered():
    for shift in (0, 3, 9):
        d = estimate_disparity(_pair_with_shift(shift))
        interior = d.values[8:-8, 24:-16]
        assert np.median(interior) == shift


def test_tie_breaks_to_smallest():
    # flat images make every candidate an exact tie
    pair = StereoFrame(left=Frame(luma=np.full((64, 64), 50.0)),
                       right=Frame(luma=np.full((64, 64), 50.0)), index=0)
    d = estimate_disparity(pair)
    assert np.all(d.values == 0)


def test_disparity_values_within_search_range():
    seq = make_seq(37, frames=2, size=64)
    for d in estimate_disparity_series(seq):
        assert d.values.min() >= 0
        assert d.values.max() <= d.search_range


def test_frame_too_narrow():
    pair = StereoFrame(left=Frame(luma=np.zeros((16, 16))),
                       right=Frame(luma=np.zeros((16, 16))), index=0)
    with pytest.raises(ParamError):
        estimate_disparity(pair)


def test_config_validation():
    with pytest.raises(ParamError):
        DisparityConfig(block=2)
    with pytest.raises(ParamError):
        DisparityConfig(search_range=0)


def test_disparity_to_depth_orientation():
    d = DisparityMap(values=np.array([[0.0, 16.0], [32.0, 8.0]]),
                     block=8, search_range=32)
    depth = disparity_to_depth(d)
    # larger disparity is nearer, so it maps to smaller depth
    assert depth[0, 0] == 1.0
    assert depth[1, 0] == 0.0


def test_disparity_to_depth_flat():
    d = DisparityMap(values=np.full((4, 4), 5.0), block=8, search_range=32)
    assert np.allclose(disparity_to_depth(d), 0.5)


def test_depth_bracket_ordering():
    values = np.zeros((16, 16))
    values[:8] = 30.0
    values[8:] = 2.0
    d = DisparityMap(values=values, block=8, search_range=32)
    s = SaliencyMap(np.ones((16, 16)), "uniform")
    bracket = depth_bracket([d], [s])
    assert bracket.near <= bracket.far
    assert bracket.bracket == pytest.approx(bracket.far - bracket.near)


def test_depth_bracket_tracks_salient_region():
    values = np.zeros((16, 16))
    values[:8] = 30.0
    d = DisparityMap(values=values, block=8, search_range=32)
    hot_top = np.ones((16, 16)) * 1e-3
    hot_top[:8] = 1.0
    narrow = depth_bracket([d], [SaliencyMap(hot_top, "external")])
    wide = depth_bracket([d], [SaliencyMap(np.ones((16, 16)), "uniform")])
    # saliency concentrated on one plane should not widen the bracket
    assert narrow.bracket <= wide.bracket + 1e-12


def test_median_filter_removes_speckle():
    pair = _pair_with_shift(4)
    # corrupt one 8x8 block of the right view; the median filter should keep
    # the surrounding field consistent
    pair.right.luma[24:32, 24:32] = 0.0
    d = estimate_disparity(pair)
    patch = d.values[8:48, 8:48]
    assert np.median(patch) == 4
