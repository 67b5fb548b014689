"""Blockwise SAD disparity estimation, relative depth, and the depth bracket.

Convention: disparity d at (x, y) matches left(x, y) with right(x - d, y);
larger d means nearer.  The search is non-negative (parallel cameras).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.ndimage

from .errors import DimensionMismatch, ParamError
from .media import StereoFrame
from .saliency import SaliencyMap


@dataclass
class DisparityConfig:
    block: int = 8
    search_range: int = 32

    def __post_init__(self):
        if self.block < 4:
            raise ParamError("block size must be >= 4")
        if self.search_range < 1:
            raise ParamError("search range must be >= 1")


@dataclass
class DisparityMap:
    values: np.ndarray
    block: int = 8
    search_range: int = 32

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(self.values)):
            raise ParamError("non-finite disparity values")

    @property
    def shape(self):
        return self.values.shape


@dataclass
class DepthBracket:
    near: float
    far: float

    @property
    def bracket(self) -> float:
        return self.far - self.near


def estimate_disparity(pair: StereoFrame, cfg: DisparityConfig | None = None) -> DisparityMap:
    """Per-block argmin-SAD match of left against right, 3x3 median filtered.

    Ties go to the smallest candidate disparity.
    """
    cfg = cfg or DisparityConfig()
    left, right = pair.left.luma, pair.right.luma
    h, w = left.shape
    if h < cfg.block or w < cfg.block:
        raise ParamError("frame smaller than the matching block")
    if w < cfg.search_range + cfg.block:
        raise ParamError("frame narrower than search_range + block")
    b = cfg.block
    out = np.zeros((h, w))
    y_anchors = sorted({min(y0, h - b) for y0 in range(0, h, b)})
    x_anchors = sorted({min(x0, w - b) for x0 in range(0, w, b)})
    for y0 in y_anchors:
        lrow = left[y0:y0 + b]
        for x0 in x_anchors:
            lblock = lrow[:, x0:x0 + b]
            d_max = min(cfg.search_range, x0)
            cand = np.empty(d_max + 1)
            for d in range(d_max + 1):
                cand[d] = np.abs(lblock - right[y0:y0 + b, x0 - d:x0 - d + b]).sum()
            out[y0:y0 + b, x0:x0 + b] = int(np.argmin(cand))
    out = scipy.ndimage.median_filter(out, size=3, mode="nearest")
    return DisparityMap(out, block=cfg.block, search_range=cfg.search_range)


def estimate_disparity_series(seq, cfg: DisparityConfig | None = None) -> list[DisparityMap]:
    return [estimate_disparity(frame, cfg) for frame in seq.frames]


def disparity_to_depth(d: DisparityMap) -> np.ndarray:
    """Relative depth in [0, 1]; nearer (larger d) maps to smaller depth."""
    values = d.values
    lo, hi = values.min(), values.max()
    if hi - lo < 1e-12:
        return np.full_like(values, 0.5)
    return 1.0 - (values - lo) / (hi - lo)


def depth_bracket(d_series, s_series, percentile: float = 5.0) -> DepthBracket:
    """Depth spread of the visually important pixels, pooled over frames.

    Pixels with saliency above its 75th percentile are kept; the bracket is
    the (100-p)th minus the pth percentile of their depths.
    """
    if len(d_series) != len(s_series):
        raise DimensionMismatch("disparity and saliency series lengths differ")
    samples = []
    for d, s in zip(d_series, s_series):
        depth = disparity_to_depth(d)
        weights = s.values if isinstance(s, SaliencyMap) else np.asarray(s)
        if weights.shape != depth.shape:
            raise DimensionMismatch("saliency/disparity shape mismatch")
        mask = weights > np.percentile(weights, 75)
        samples.append(depth[mask] if mask.any() else depth.ravel())
    pooled = np.concatenate(samples)
    near = float(np.percentile(pooled, percentile))
    far = float(np.percentile(pooled, 100.0 - percentile))
    return DepthBracket(near=near, far=far)
