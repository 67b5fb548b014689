"""Full-reference stereo quality metrics, each with optional saliency pooling.

Every metric pools local values with weighted_spatial_mean, so passing a
constant saliency series reproduces the base (unweighted) metric.  Saliency
for FR scoring comes from the reference pair; temporal pooling is the plain
mean over frames.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .disparity import DisparityMap, disparity_to_depth
from .errors import (
    DimensionMismatch,
    DisparityRequired,
    NeedsTemporalContext,
    ParamError,
    SequenceLengthError,
    TooSmall,
)
from .kernels import (
    Kernel2D,
    convolve2d,
    dct2_stack,
    dct3_stereo_stack,
    gaussian_kernel,
    halving_chain,
    idct2_stack,
    sobel_gradient,
)
from .media import StereoFrame, StereoSequence
from .report import MetricReport, make_report
from .saliency import SaliencyMap, build_saliency_pyramid, weighted_spatial_mean

MSSSIM_EXPONENTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)


@dataclass
class FrMetricConfig:
    psnr_cap: float = 100.0
    ssim_c1: float = (0.01 * 255) ** 2
    ssim_c2: float = (0.03 * 255) ** 2
    ssim_window: int = 11
    ssim_sigma: float = 1.5
    msssim_exponents: tuple = MSSSIM_EXPONENTS
    vif_scales: int = 4
    vif_sigma_n_sq: float = 2.0
    # OQ combination constants; the source constants are unpublished, these
    # neutral defaults keep the perfect score at exactly a.
    oq_a: float = 1.0
    oq_b: float = 1.0
    oq_c: float = 0.0
    oq_d: float = 1.0
    oq_e: float = 1.0
    phsd_epsilon: float = 0.5
    phsd_alpha: float = 1.0
    csf_mask: tuple = tuple(tuple(1.0 for _ in range(4)) for _ in range(4))
    hv3d_beta1: float = 1.0
    hv3d_beta2: float = 1.0
    hv3d_beta3: float = 1.0
    hv3d_block: int = 8
    flosim_patch: int = 8

    def __post_init__(self):
        if abs(sum(self.msssim_exponents) - 1.0) > 1e-3:
            raise ParamError("MS-SSIM exponents must sum to 1 within 1e-3")
        if np.asarray(self.csf_mask).shape != (4, 4):
            raise ParamError("CSF mask must be 4x4")


_VIEWS = ("left", "right")


def _saliency_mode(s_series) -> str:
    return "none" if s_series is None else s_series[0].source


def _validate_pair(ref: StereoSequence, dist: StereoSequence, s_series) -> None:
    if len(ref) != len(dist):
        raise SequenceLengthError(f"{len(ref)} vs {len(dist)} frames")
    if (ref.height, ref.width) != (dist.height, dist.width):
        raise DimensionMismatch("reference and distorted dimensions differ")
    if s_series is not None and len(s_series) != len(ref):
        raise SequenceLengthError("saliency series length does not match frames")


def _require_disparity(*series):
    for d in series:
        if d is None:
            raise DisparityRequired("this metric needs disparity maps")


def _smap(s_series, t):
    return None if s_series is None else s_series[t]


def _dmap(d_series, t) -> np.ndarray:
    d = d_series[t]
    return d.values if isinstance(d, DisparityMap) else np.asarray(d, dtype=np.float64)


def _ssim_window(cfg: FrMetricConfig) -> Kernel2D:
    return gaussian_kernel(cfg.ssim_window, cfg.ssim_sigma)


def _raw_moments(x, y, window):
    # Unclamped moments: identical inputs then give a ssim map of exactly 1.
    mu_x = convolve2d(x, window)
    mu_y = convolve2d(y, window)
    var_x = convolve2d(x * x, window) - mu_x * mu_x
    var_y = convolve2d(y * y, window) - mu_y * mu_y
    cov = convolve2d(x * y, window) - mu_x * mu_y
    return mu_x, mu_y, var_x, var_y, cov


def _ssim_map(x, y, cfg: FrMetricConfig, window: Kernel2D | None = None) -> np.ndarray:
    window = window or _ssim_window(cfg)
    mu_x, mu_y, var_x, var_y, cov = _raw_moments(x, y, window)
    c1, c2 = cfg.ssim_c1, cfg.ssim_c2
    num = (2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    return num / den


def _psnr_from_mse(mse: float, cap: float) -> float:
    if mse <= 0.0:
        return cap
    return min(cap, 10.0 * np.log10(255.0**2 / mse))


def psnr_s(ref: StereoSequence, dist: StereoSequence, s_series=None,
           cfg: FrMetricConfig | None = None) -> MetricReport:
    """PSNR over saliency-weighted MSE, averaged over views."""
    cfg = cfg or FrMetricConfig()
    _validate_pair(ref, dist, s_series)
    scores = []
    for t in range(len(ref)):
        s = _smap(s_series, t)
        per_view = []
        for view in _VIEWS:
            err = getattr(ref.frames[t], view).luma - getattr(dist.frames[t], view).luma
            mse = weighted_spatial_mean(err * err, s)
            per_view.append(_psnr_from_mse(mse, cfg.psnr_cap))
        scores.append(0.5 * (per_view[0] + per_view[1]))
    return make_report("psnr_s", scores, "higher_better", _saliency_mode(s_series), cfg)


def ssim_s(ref: StereoSequence, dist: StereoSequence, s_series=None,
           cfg: FrMetricConfig | None = None) -> MetricReport:
    """Saliency-pooled local SSIM, averaged over views."""
    cfg = cfg or FrMetricConfig()
    _validate_pair(ref, dist, s_series)
    window = _ssim_window(cfg)
    scores = []
    for t in range(len(ref)):
        s = _smap(s_series, t)
        vals = [
            weighted_spatial_mean(
                _ssim_map(getattr(ref.frames[t], view).luma,
                          getattr(dist.frames[t], view).luma, cfg, window), s)
            for view in _VIEWS
        ]
        scores.append(0.5 * (vals[0] + vals[1]))
    return make_report("ssim_s", scores, "higher_better", _saliency_mode(s_series), cfg)


def _msssim_scales(height: int, width: int, cfg: FrMetricConfig) -> int:
    m = 1
    chain = halving_chain(height, width, 5)
    while m < 5 and min(chain[m]) >= cfg.ssim_window:
        m += 1
    return m


def _msssim_frame(x: np.ndarray, y: np.ndarray, s: SaliencyMap | None,
                  cfg: FrMetricConfig, window: Kernel2D) -> float:
    scales = _msssim_scales(x.shape[0], x.shape[1], cfg)
    if scales < 2:
        raise TooSmall("image supports fewer than 2 MS-SSIM scales")
    weights = np.asarray(cfg.msssim_exponents[:scales])
    weights = weights / weights.sum()
    s_levels = None
    if s is not None:
        s_levels = build_saliency_pyramid(s, halving_chain(*x.shape, scales)).levels
    c1, c2 = cfg.ssim_c1, cfg.ssim_c2
    score = 1.0
    from .kernels import downsample2  # local import avoids a cycle at module load

    for m in range(scales):
        s_m = None if s_levels is None else s_levels[m]
        mu_x, mu_y, var_x, var_y, cov = _raw_moments(x, y, window)
        cs_map = (2.0 * cov + c2) / (var_x + var_y + c2)
        cs = max(weighted_spatial_mean(cs_map, s_m), 0.0)
        if m == scales - 1:
            l_map = (2.0 * mu_x * mu_y + c1) / (mu_x * mu_x + mu_y * mu_y + c1)
            lum = max(weighted_spatial_mean(l_map, s_m), 0.0)
            score *= lum ** weights[m] * cs ** weights[m]
        else:
            score *= cs ** weights[m]
            x, y = downsample2(x), downsample2(y)
    return float(score)


def msssim_s(ref: StereoSequence, dist: StereoSequence, s_series=None,
             cfg: FrMetricConfig | None = None) -> MetricReport:
    """Multi-scale SSIM with per-scale saliency pyramids, averaged over views."""
    cfg = cfg or FrMetricConfig()
    _validate_pair(ref, dist, s_series)
    window = _ssim_window(cfg)
    scales = _msssim_scales(ref.height, ref.width, cfg)
    flags = [] if scales == 5 else [f"scales_reduced:{scales}"]
    scores = []
    for t in range(len(ref)):
        s = _smap(s_series, t)
        vals = [
            _msssim_frame(getattr(ref.frames[t], view).luma,
                          getattr(dist.frames[t], view).luma, s, cfg, window)
            for view in _VIEWS
        ]
        scores.append(0.5 * (vals[0] + vals[1]))
    return make_report("msssim_s", scores, "higher_better",
                       _saliency_mode(s_series), cfg, flags)


def _vif_frame(x: np.ndarray, y: np.ndarray, s: SaliencyMap | None,
               cfg: FrMetricConfig) -> float:
    if min(x.shape) < 32:
        raise TooSmall("VIF needs at least 32 pixels per side")
    s_levels = None
    if s is not None:
        s_levels = build_saliency_pyramid(
            s, halving_chain(*x.shape, cfg.vif_scales)).levels
    sigma_n_sq = cfg.vif_sigma_n_sq
    num_total = 0.0
    den_total = 0.0
    for k in range(1, cfg.vif_scales + 1):
        size = 2 ** (cfg.vif_scales - k + 1) + 1
        window = gaussian_kernel(size, size / 5.0)
        if k > 1:
            x = convolve2d(x, window)[::2, ::2]
            y = convolve2d(y, window)[::2, ::2]
        _, _, var_x, var_y, cov = _raw_moments(x, y, window)
        var_x = np.maximum(var_x, 0.0)
        var_y = np.maximum(var_y, 0.0)
        g = np.where(var_x > 1e-10, cov / np.where(var_x > 1e-10, var_x, 1.0), 0.0)
        g = np.maximum(g, 0.0)
        sv_sq = np.maximum(var_y - g * cov, 0.0)
        num_map = np.log10(1.0 + g * g * var_x / (sv_sq + sigma_n_sq))
        den_map = np.log10(1.0 + var_x / sigma_n_sq)
        if s_levels is None:
            num_total += num_map.sum()
            den_total += den_map.sum()
        else:
            w = s_levels[k - 1].values
            num_total += (num_map * w).sum()
            den_total += (den_map * w).sum()
    if den_total <= 0.0:
        return 1.0
    return float(num_total / den_total)


def vif_s(ref: StereoSequence, dist: StereoSequence, s_series=None,
          cfg: FrMetricConfig | None = None) -> MetricReport:
    """Pixel-domain visual information fidelity over 4 scales, view-averaged."""
    cfg = cfg or FrMetricConfig()
    _validate_pair(ref, dist, s_series)
    scores = []
    for t in range(len(ref)):
        s = _smap(s_series, t)
        vals = [
            _vif_frame(getattr(ref.frames[t], view).luma,
                       getattr(dist.frames[t], view).luma, s, cfg)
            for view in _VIEWS
        ]
        scores.append(0.5 * (vals[0] + vals[1]))
    return make_report("vif_s", scores, "higher_better", _saliency_mode(s_series), cfg)


def ddl1_s(ref: StereoSequence, dist: StereoSequence, d_ref=None, d_dist=None,
           s_series=None, cfg: FrMetricConfig | None = None) -> MetricReport:
    """SSIM damped by disparity differences; per-frame value is left + right.

    The disparity factor is clamp01(1 - sqrt(|D^2 - D'^2|) / 255); the absolute
    value keeps the radicand real when the distorted disparity is larger.
    """
    cfg = cfg or FrMetricConfig()
    _validate_pair(ref, dist, s_series)
    _require_disparity(d_ref, d_dist)
    window = _ssim_window(cfg)
    scores = []
    for t in range(len(ref)):
        s = _smap(s_series, t)
        dr, dd = _dmap(d_ref, t), _dmap(d_dist, t)
        factor = np.clip(1.0 - np.sqrt(np.abs(dr * dr - dd * dd)) / 255.0, 0.0, 1.0)
        total = 0.0
        for view in _VIEWS:
            smap = _ssim_map(getattr(ref.frames[t], view).luma,
                             getattr(dist.frames[t], view).luma, cfg, window)
            total += weighted_spatial_mean(smap * factor, s)
        scores.append(total)
    return make_report("ddl1_s", scores, "higher_better", _saliency_mode(s_series), cfg)


def oq_s(ref: StereoSequence, dist: StereoSequence, d_ref=None, d_dist=None,
         s_series=None, cfg: FrMetricConfig | None = None) -> MetricReport:
    """Combination of view SSIM and mean absolute disparity difference.

    Orientation is composite: the two terms move in opposite directions and
    the published combination constants are unavailable.
    """
    cfg = cfg or FrMetricConfig()
    _validate_pair(ref, dist, s_series)
    _require_disparity(d_ref, d_dist)
    window = _ssim_window(cfg)
    scores = []
    for t in range(len(ref)):
        s = _smap(s_series, t)
        iq = 0.5 * sum(
            weighted_spatial_mean(
                _ssim_map(getattr(ref.frames[t], view).luma,
                          getattr(dist.frames[t], view).luma, cfg, window), s)
            for view in _VIEWS
        )
        dq = weighted_spatial_mean(np.abs(_dmap(d_ref, t) - _dmap(d_dist, t)), s)
        iq_d = np.power(iq, cfg.oq_d)
        scores.append(cfg.oq_a * iq_d + cfg.oq_b * np.power(dq, cfg.oq_e)
                      + cfg.oq_c * iq_d * np.power(dq, cfg.oq_d))
    return make_report("oq_s", scores, "composite", _saliency_mode(s_series), cfg)


def cyclopean_fuse(pair: StereoFrame, d: DisparityMap) -> np.ndarray:
    """Disparity-compensated average of the two views."""
    left, right = pair.left.luma, pair.right.luma
    h, w = left.shape
    dv = d.values if isinstance(d, DisparityMap) else np.asarray(d)
    if dv.shape != left.shape:
        raise DimensionMismatch("disparity map shape does not match frame")
    cols = np.clip(np.arange(w)[None, :] - np.rint(dv).astype(int), 0, w - 1)
    rows = np.arange(h)[:, None]
    return 0.5 * (left + right[rows, cols])


def ciq_s(ref: StereoSequence, dist: StereoSequence, d_ref=None, d_dist=None,
          s_series=None, cfg: FrMetricConfig | None = None) -> MetricReport:
    """Saliency-pooled SSIM between the two cyclopean views."""
    cfg = cfg or FrMetricConfig()
    _validate_pair(ref, dist, s_series)
    _require_disparity(d_ref, d_dist)
    window = _ssim_window(cfg)
    scores = []
    for t in range(len(ref)):
        ci_ref = cyclopean_fuse(ref.frames[t], d_ref[t])
        ci_dist = cyclopean_fuse(dist.frames[t], d_dist[t])
        smap = _ssim_map(ci_ref, ci_dist, cfg, window)
        scores.append(weighted_spatial_mean(smap, _smap(s_series, t)))
    return make_report("ciq_s", scores, "higher_better", _saliency_mode(s_series), cfg)


def _gather_blocks(image: np.ndarray, anchors, size: int) -> np.ndarray:
    return np.stack([image[y0:y0 + size, x0:x0 + size] for y0, x0 in anchors])


def _block_grid(h: int, w: int, size: int):
    return [(y0, x0) for y0 in range(0, h - size + 1, size)
            for x0 in range(0, w - size + 1, size)]


def _matched_anchors(anchors, d_values: np.ndarray, size: int, w: int):
    out = []
    for y0, x0 in anchors:
        d = int(np.rint(d_values[y0:y0 + size, x0:x0 + size].mean()))
        out.append((y0, int(np.clip(x0 - d, 0, w - size))))
    return out


def _block_weights(s: SaliencyMap | None, anchors, size: int) -> np.ndarray:
    if s is None:
        return np.ones(len(anchors))
    return np.array([s.values[y0:y0 + size, x0:x0 + size].mean() for y0, x0 in anchors])


def _structure_errors(ref_t: StereoFrame, dist_t: StereoFrame, d_values: np.ndarray,
                      cfg: FrMetricConfig):
    """Per 4x4 block: CSF-masked squared difference of 3D-DCT coefficients."""
    h, w = ref_t.left.luma.shape
    anchors = _block_grid(h, w, 4)
    matched = _matched_anchors(anchors, d_values, 4, w)
    pairs_ref = np.stack([
        np.stack([ref_t.left.luma[y0:y0 + 4, x0:x0 + 4],
                  ref_t.right.luma[y1:y1 + 4, x1:x1 + 4]], axis=-1)
        for (y0, x0), (y1, x1) in zip(anchors, matched)
    ])
    pairs_dist = np.stack([
        np.stack([dist_t.left.luma[y0:y0 + 4, x0:x0 + 4],
                  dist_t.right.luma[y1:y1 + 4, x1:x1 + 4]], axis=-1)
        for (y0, x0), (y1, x1) in zip(anchors, matched)
    ])
    diff = dct3_stereo_stack(pairs_ref) - dct3_stereo_stack(pairs_dist)
    csf = np.asarray(cfg.csf_mask, dtype=np.float64)[None, :, :, None]
    errors = np.mean((diff * csf) ** 2, axis=(1, 2, 3))
    return anchors, errors


def phvs3d_s(ref: StereoSequence, dist: StereoSequence, d_ref=None,
             s_series=None, cfg: FrMetricConfig | None = None) -> MetricReport:
    """PSNR over the saliency-weighted MSE of 3D-DCT block structures."""
    cfg = cfg or FrMetricConfig()
    _validate_pair(ref, dist, s_series)
    _require_disparity(d_ref)
    scores = []
    for t in range(len(ref)):
        anchors, errors = _structure_errors(ref.frames[t], dist.frames[t],
                                            _dmap(d_ref, t), cfg)
        weights = _block_weights(_smap(s_series, t), anchors, 4)
        mse = float((errors * weights).sum() / weights.sum())
        scores.append(_psnr_from_mse(mse, cfg.psnr_cap))
    return make_report("phvs3d_s", scores, "higher_better",
                       _saliency_mode(s_series), cfg)


def phsd_s(ref: StereoSequence, dist: StereoSequence, d_ref=None, d_dist=None,
           s_series=None, cfg: FrMetricConfig | None = None) -> MetricReport:
    """Block-structure error masked by local disparity variance, mixed with
    the squared disparity-difference error."""
    cfg = cfg or FrMetricConfig()
    _validate_pair(ref, dist, s_series)
    _require_disparity(d_ref, d_dist)
    eps, alpha = cfg.phsd_epsilon, cfg.phsd_alpha
    scores = []
    for t in range(len(ref)):
        s = _smap(s_series, t)
        dr, dd = _dmap(d_ref, t), _dmap(d_dist, t)
        mse_d = weighted_spatial_mean((dr - dd) ** 2, s)
        anchors, errors = _structure_errors(ref.frames[t], dist.frames[t], dr, cfg)
        sigma_d = np.array([np.var(dr[y0:y0 + 4, x0:x0 + 4]) for y0, x0 in anchors])
        den = errors + alpha * sigma_d
        masked = np.where(den > 0.0, errors * errors / np.where(den > 0.0, den, 1.0), 0.0)
        weights = _block_weights(s, anchors, 4)
        mse_i = float((masked * weights).sum() / weights.sum())
        scores.append(_psnr_from_mse((1.0 - eps) * mse_i + eps * mse_d, cfg.psnr_cap))
    return make_report("phsd_s", scores, "higher_better", _saliency_mode(s_series), cfg)


def mj3d_s(ref: StereoSequence, dist: StereoSequence, d_ref=None, d_dist=None,
           s_series=None, cfg: FrMetricConfig | None = None) -> MetricReport:
    """Multi-scale SSIM of the cyclopean views."""
    cfg = cfg or FrMetricConfig()
    _validate_pair(ref, dist, s_series)
    _require_disparity(d_ref, d_dist)
    window = _ssim_window(cfg)
    scores = []
    for t in range(len(ref)):
        ci_ref = cyclopean_fuse(ref.frames[t], d_ref[t])
        ci_dist = cyclopean_fuse(dist.frames[t], d_dist[t])
        scores.append(_msssim_frame(ci_ref, ci_dist, _smap(s_series, t), cfg, window))
    return make_report("mj3d_s", scores, "higher_better", _saliency_mode(s_series), cfg)


def _global_ssim(x: np.ndarray, y: np.ndarray, cfg: FrMetricConfig) -> float:
    mu_x, mu_y = x.mean(), y.mean()
    var_x = (x * x).mean() - mu_x * mu_x
    var_y = (y * y).mean() - mu_y * mu_y
    cov = (x * y).mean() - mu_x * mu_y
    c1, c2 = cfg.ssim_c1, cfg.ssim_c2
    return float(((2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2))
                 / ((mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)))


def hv3d_s(ref: StereoSequence, dist: StereoSequence, d_ref=None, d_dist=None,
           s_series=None, cfg: FrMetricConfig | None = None) -> MetricReport:
    """Product of fused-block SSIM, disparity VIF, and the saliency-weighted
    block variance ratio of the reference disparity map."""
    cfg = cfg or FrMetricConfig()
    _validate_pair(ref, dist, s_series)
    _require_disparity(d_ref, d_dist)
    b = cfg.hv3d_block
    h, w = ref.height, ref.width
    anchors = _block_grid(h, w, b)
    scores = []
    for t in range(len(ref)):
        s = _smap(s_series, t)
        dr, dd = _dmap(d_ref, t), _dmap(d_dist, t)
        matched_ref = _matched_anchors(anchors, dr, b, w)
        matched_dist = _matched_anchors(anchors, dd, b, w)
        xc_ref = 0.5 * (
            dct2_stack(_gather_blocks(ref.frames[t].left.luma, anchors, b))
            + dct2_stack(_gather_blocks(ref.frames[t].right.luma, matched_ref, b)))
        xc_dist = 0.5 * (
            dct2_stack(_gather_blocks(dist.frames[t].left.luma, anchors, b))
            + dct2_stack(_gather_blocks(dist.frames[t].right.luma, matched_dist, b)))
        rec_ref = idct2_stack(xc_ref)
        rec_dist = idct2_stack(xc_dist)
        weights = _block_weights(s, anchors, b)
        ssim_vals = np.array([
            _global_ssim(rec_ref[i], rec_dist[i], cfg) for i in range(len(anchors))
        ])
        term1 = float((ssim_vals * weights).sum() / weights.sum())
        term2 = _vif_frame(dr, dd, s, cfg)
        sigma = np.array([np.var(dr[y0:y0 + b, x0:x0 + b]) for y0, x0 in anchors])
        max_sigma = sigma.max()
        if max_sigma <= 0.0:
            term3 = 1.0
        else:
            term3 = float((sigma * weights).sum() / (weights.sum() * max_sigma))
        scores.append(max(term1, 0.0) ** cfg.hv3d_beta1
                      * max(term2, 0.0) ** cfg.hv3d_beta2
                      * term3 ** cfg.hv3d_beta3)
    return make_report("hv3d_s", scores, "higher_better", _saliency_mode(s_series), cfg)


def _patch_features(image: np.ndarray, patch: int) -> np.ndarray:
    """(mean, variance, min gradient-covariance eigenvalue) per patch."""
    grad = sobel_gradient(image)
    gx, gy = grad["gx"], grad["gy"]
    rows = []
    for y0, x0 in _block_grid(image.shape[0], image.shape[1], patch):
        p = image[y0:y0 + patch, x0:x0 + patch]
        pgx = gx[y0:y0 + patch, x0:x0 + patch]
        pgy = gy[y0:y0 + patch, x0:x0 + patch]
        a = float((pgx * pgx).mean())
        c = float((pgy * pgy).mean())
        bb = float((pgx * pgy).mean())
        min_eig = 0.5 * ((a + c) - np.sqrt((a - c) ** 2 + 4.0 * bb * bb))
        rows.append((p.mean(), p.var(), min_eig))
    return np.asarray(rows)


def flosim3d_s(ref: StereoSequence, dist: StereoSequence, d_ref=None, d_dist=None,
               s_series=None, cfg: FrMetricConfig | None = None) -> MetricReport:
    """Temporal patch-feature dispersion gated by spatial and depth
    dissimilarity (1 - MS-SSIM); lower is better, 0 means identical."""
    cfg = cfg or FrMetricConfig()
    _validate_pair(ref, dist, s_series)
    _require_disparity(d_ref, d_dist)
    if len(ref) < 2:
        raise NeedsTemporalContext("needs at least 2 frames")
    window = _ssim_window(cfg)
    flow_scores = []
    depth_scores = []
    for t in range(1, len(ref)):
        s = _smap(s_series, t)
        total = 0.0
        for view in _VIEWS:
            ref_diff = (getattr(ref.frames[t], view).luma
                        - getattr(ref.frames[t - 1], view).luma)
            dist_diff = (getattr(dist.frames[t], view).luma
                         - getattr(dist.frames[t - 1], view).luma)
            q_fl = float(np.abs(_patch_features(ref_diff, cfg.flosim_patch)
                                - _patch_features(dist_diff, cfg.flosim_patch))
                         .sum(axis=1).mean())
            q_s = 1.0 - _msssim_frame(getattr(ref.frames[t], view).luma,
                                      getattr(dist.frames[t], view).luma,
                                      s, cfg, window)
            total += q_s * q_fl
        flow_scores.append(0.5 * total)
        depth_ref = disparity_to_depth(d_ref[t]) * 255.0
        depth_dist = disparity_to_depth(d_dist[t]) * 255.0
        q_d = 1.0 - _msssim_frame(depth_ref, depth_dist, s, cfg, window)
        depth_scores.append(q_d)  # the shared map serves both view depths
    q_d_mean = float(np.mean(depth_scores))
    scores = [f * q_d_mean for f in flow_scores]
    return make_report("flosim3d_s", scores, "lower_better",
                       _saliency_mode(s_series), cfg)


FR_METRICS = {
    "psnr_s": psnr_s,
    "ssim_s": ssim_s,
    "msssim_s": msssim_s,
    "vif_s": vif_s,
    "ddl1_s": ddl1_s,
    "oq_s": oq_s,
    "ciq_s": ciq_s,
    "phvs3d_s": phvs3d_s,
    "phsd_s": phsd_s,
    "mj3d_s": mj3d_s,
    "hv3d_s": hv3d_s,
    "flosim3d_s": flosim3d_s,
}

FR_NEEDS_DISPARITY = {
    "ddl1_s": ("d_ref", "d_dist"),
    "oq_s": ("d_ref", "d_dist"),
    "ciq_s": ("d_ref", "d_dist"),
    "phvs3d_s": ("d_ref",),
    "phsd_s": ("d_ref", "d_dist"),
    "mj3d_s": ("d_ref", "d_dist"),
    "hv3d_s": ("d_ref", "d_dist"),
    "flosim3d_s": ("d_ref", "d_dist"),
}
