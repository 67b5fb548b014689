"""No-reference metrics over the distorted sequence alone.

Saliency here comes from the distorted pair (no reference exists).  Each
metric averages the two views per frame and pools frames by the plain mean;
orientation is recorded per metric because sign conventions differ.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .disparity import DisparityMap
from .errors import (
    DimensionMismatch,
    DisparityRequired,
    NeedsTemporalContext,
    NoEdges,
    ParamError,
    SequenceLengthError,
)
from .kernels import Kernel2D, convolve2d, sobel_gradient
from .media import StereoSequence
from .report import MetricReport, make_report
from .saliency import SaliencyMap


@dataclass
class NrMetricConfig:
    gbim_grid: int = 8
    gbim_masking: str = "neutral"  # neutral | luminance
    nrpbm_probe: int = 9
    farias_edge_threshold: float = 0.1  # fraction of the max gradient
    sadaka_region: int = 64
    sadaka_beta: float = 3.6
    sadaka_contrast_threshold: float = 50.0
    sadaka_jnb_wide: float = 5.0
    sadaka_jnb_narrow: float = 3.0
    vqsm_alphas: tuple = (0.0, 1.0, 0.0, -1.0, 0.0)
    aqi_directions: tuple = (0, 45, 90, 135)
    aqi_bins: int = 64
    qa3d_threshold: float = 1.0
    qa3d_history: int = 10
    # QJPEG reference-convention constants; overridable, not asserted faithful.
    nospdm_alpha: float = -245.9
    nospdm_beta: float = 261.9
    nospdm_gamma1: float = -0.0240
    nospdm_gamma2: float = 0.0160
    nospdm_gamma3: float = 0.0064
    nospdm_mu_r: float = 1.0
    nospdm_omega_s: float = 1.0
    nospdm_lambda: float = 0.5

    def __post_init__(self):
        if self.qa3d_history < 1:
            raise ParamError("history window must be >= 1")
        if self.qa3d_threshold < 0:
            raise ParamError("disparity threshold must be >= 0")
        if self.gbim_masking not in ("neutral", "luminance"):
            raise ParamError("gbim_masking must be 'neutral' or 'luminance'")


_VIEWS = ("left", "right")


def _saliency_mode(s_series) -> str:
    return "none" if s_series is None else s_series[0].source


def _validate(dist: StereoSequence, s_series) -> None:
    if s_series is not None and len(s_series) != len(dist):
        raise SequenceLengthError("saliency series length does not match frames")


def _svalues(s_series, t, shape) -> np.ndarray:
    if s_series is None:
        return np.ones(shape)
    s = s_series[t]
    values = s.values if isinstance(s, SaliencyMap) else np.asarray(s)
    if values.shape != shape:
        raise DimensionMismatch("saliency shape does not match frame")
    return values


def _wmean(values: np.ndarray, weights: np.ndarray) -> float:
    total = weights.sum()
    if total <= 0:
        return 0.0
    return float((values * weights).sum() / total)


def _local_std(image: np.ndarray, size: int) -> np.ndarray:
    box = Kernel2D(np.full((size, size), 1.0 / size**2), normalized=True)
    mu = convolve2d(image, box)
    return np.sqrt(np.maximum(convolve2d(image * image, box) - mu * mu, 0.0))


def _gbim_frame(luma: np.ndarray, s: np.ndarray, cfg: NrMetricConfig) -> float:
    h, w = luma.shape
    g = cfg.gbim_grid
    if cfg.gbim_masking == "luminance":
        mask = 1.0 / (1.0 + _local_std(luma, 3) / 32.0)
    else:
        mask = np.ones_like(luma)
    dh = np.abs(luma[:, 1:] - luma[:, :-1])
    dv = np.abs(luma[1:, :] - luma[:-1, :])
    e = (dh.sum() + dv.sum()) / (dh.size + dv.size)
    if e <= 0.0:
        return 0.0
    cols = np.arange(g, w, g)
    rows = np.arange(g, h, g)
    diff_h = np.abs(luma[:, cols] - luma[:, cols - 1])
    w_h = 0.5 * (mask[:, cols] + mask[:, cols - 1])
    s_h = 0.5 * (s[:, cols] + s[:, cols - 1])
    diff_v = np.abs(luma[rows, :] - luma[rows - 1, :])
    w_v = 0.5 * (mask[rows, :] + mask[rows - 1, :])
    s_v = 0.5 * (s[rows, :] + s[rows - 1, :])
    m_h = _wmean(w_h * diff_h, s_h)
    m_v = _wmean(w_v * diff_v, s_v)
    return (m_h + m_v) / (2.0 * e)


def gbim_s(dist: StereoSequence, s_series=None,
           cfg: NrMetricConfig | None = None) -> MetricReport:
    """Block-edge impairment: 8-grid boundary differences over the frame's
    average inter-pixel difference.  Lower is better."""
    cfg = cfg or NrMetricConfig()
    _validate(dist, s_series)
    shape = (dist.height, dist.width)
    scores = []
    for t in range(len(dist)):
        s = _svalues(s_series, t, shape)
        vals = [_gbim_frame(getattr(dist.frames[t], v).luma, s, cfg) for v in _VIEWS]
        scores.append(0.5 * (vals[0] + vals[1]))
    return make_report("gbim_s", scores, "lower_better", _saliency_mode(s_series), cfg)


def _nrpbm_frame(luma: np.ndarray, s: np.ndarray, cfg: NrMetricConfig) -> float:
    n = cfg.nrpbm_probe
    blur_h = convolve2d(luma, _probe(n, axis=1))
    blur_v = convolve2d(luma, _probe(n, axis=0))
    ratios = []
    for blurred, axis in ((blur_h, 1), (blur_v, 0)):
        df = np.abs(np.diff(luma, axis=axis))
        db = np.abs(np.diff(blurred, axis=axis))
        dv = np.maximum(df - db, 0.0)
        if axis == 1:
            sw = 0.5 * (s[:, 1:] + s[:, :-1])
        else:
            sw = 0.5 * (s[1:, :] + s[:-1, :])
        denom = (df * sw).sum()
        ratios.append((dv * sw).sum() / denom if denom > 0 else None)
    if all(r is None for r in ratios):
        return 0.0  # flat frame
    return 1.0 - max(r for r in ratios if r is not None)


def _probe(n: int, axis: int) -> Kernel2D:
    # 1 x n (or n x 1) box probe embedded in an n x n kernel for convolve2d
    taps = np.zeros((n, n))
    if axis == 1:
        taps[n // 2, :] = 1.0 / n
    else:
        taps[:, n // 2] = 1.0 / n
    return Kernel2D(taps, normalized=True)


def nrpbm_s(dist: StereoSequence, s_series=None,
            cfg: NrMetricConfig | None = None) -> MetricReport:
    """Perceptual blur via the re-blur probe; higher means blurrier
    (lower is better)."""
    cfg = cfg or NrMetricConfig()
    _validate(dist, s_series)
    shape = (dist.height, dist.width)
    scores = []
    for t in range(len(dist)):
        s = _svalues(s_series, t, shape)
        vals = [_nrpbm_frame(getattr(dist.frames[t], v).luma, s, cfg) for v in _VIEWS]
        scores.append(0.5 * (vals[0] + vals[1]))
    return make_report("nrpbm_s", scores, "lower_better", _saliency_mode(s_series), cfg)


def _edge_widths(luma: np.ndarray, threshold_frac: float):
    """Marziliano-style widths: length of the monotone luma run through each
    edge pixel along the dominant gradient axis."""
    grad = sobel_gradient(luma)
    mag = grad["magnitude"]
    gmax = mag.max()
    if gmax <= 0.0:
        return []
    thr = threshold_frac * gmax
    gx, gy = grad["gx"], grad["gy"]
    out = []
    h, w = luma.shape
    for y, x in zip(*np.nonzero(mag > thr)):
        if abs(gx[y, x]) >= abs(gy[y, x]):
            line, pos, extent, slope = luma[y, :], x, w, gx[y, x]
        else:
            line, pos, extent, slope = luma[:, x], y, h, gy[y, x]
        up = slope >= 0
        p1 = pos
        while p1 > 0 and (line[p1 - 1] < line[p1] if up else line[p1 - 1] > line[p1]):
            p1 -= 1
        p2 = pos
        while p2 < extent - 1 and (line[p2 + 1] > line[p2] if up else line[p2 + 1] < line[p2]):
            p2 += 1
        out.append((int(y), int(x), float(p2 - p1)))
    return out


def blur_farias_s(dist: StereoSequence, s_series=None,
                  cfg: NrMetricConfig | None = None) -> MetricReport:
    """Mean edge width at Sobel edge pixels; lower (sharper) is better."""
    cfg = cfg or NrMetricConfig()
    _validate(dist, s_series)
    shape = (dist.height, dist.width)
    scores = []
    for t in range(len(dist)):
        s = _svalues(s_series, t, shape)
        vals = []
        for view in _VIEWS:
            edges = _edge_widths(getattr(dist.frames[t], view).luma,
                                 cfg.farias_edge_threshold)
            if not edges:
                raise NoEdges(f"no edge pixels in frame {t} ({view})")
            widths = np.array([wd for _, _, wd in edges])
            weights = np.array([s[y, x] for y, x, _ in edges])
            vals.append(_wmean(widths, weights))
        scores.append(0.5 * (vals[0] + vals[1]))
    return make_report("blur_farias_s", scores, "lower_better",
                       _saliency_mode(s_series), cfg)


def _block_farias_frame(luma: np.ndarray, s: np.ndarray, cfg: NrMetricConfig) -> float:
    h, w = luma.shape
    g = cfg.gbim_grid
    total = 0.0
    dv = np.abs(luma[1:, :] - luma[:-1, :])
    sv = 0.5 * (s[1:, :] + s[:-1, :])
    rows = np.arange(g, h, g) - 1  # difference index i-1 sits between rows i-1, i
    den = (dv * sv).sum()
    if den > 0:
        total += (dv[rows, :] * sv[rows, :]).sum() / den
    dh = np.abs(luma[:, 1:] - luma[:, :-1])
    sh = 0.5 * (s[:, 1:] + s[:, :-1])
    cols = np.arange(g, w, g) - 1
    den = (dh * sh).sum()
    if den > 0:
        total += (dh[:, cols] * sh[:, cols]).sum() / den
    return total / (h * w)


def block_farias_s(dist: StereoSequence, s_series=None,
                   cfg: NrMetricConfig | None = None) -> MetricReport:
    """Ratio of 8-grid boundary differences to all differences, scaled by
    1/(H*W); lower is better."""
    cfg = cfg or NrMetricConfig()
    _validate(dist, s_series)
    shape = (dist.height, dist.width)
    scores = []
    for t in range(len(dist)):
        s = _svalues(s_series, t, shape)
        vals = [_block_farias_frame(getattr(dist.frames[t], v).luma, s, cfg)
                for v in _VIEWS]
        scores.append(0.5 * (vals[0] + vals[1]))
    return make_report("block_farias_s", scores, "lower_better",
                       _saliency_mode(s_series), cfg)


def _sadaka_frame(luma: np.ndarray, s: np.ndarray, cfg: NrMetricConfig) -> float:
    h, w = luma.shape
    edges = _edge_widths(luma, cfg.farias_edge_threshold)
    if not edges:
        raise NoEdges("no edge pixels for foveal sharpness pooling")
    beta = cfg.sadaka_beta
    s_total = s.sum()
    r = cfg.sadaka_region
    total = 0.0
    for y0 in range(0, h, r):
        for x0 in range(0, w, r):
            y1, x1 = min(y0 + r, h), min(x0 + r, w)
            in_region = [wd for y, x, wd in edges if y0 <= y < y1 and x0 <= x < x1]
            if not in_region:
                continue
            region = luma[y0:y1, x0:x1]
            contrast = region.max() - region.min()
            w_jnb = (cfg.sadaka_jnb_wide if contrast <= cfg.sadaka_contrast_threshold
                     else cfg.sadaka_jnb_narrow)
            d_r = np.sum(np.abs(np.asarray(in_region) / w_jnb) ** beta) ** (1.0 / beta)
            weight = (s[y0:y1, x0:x1].sum() / s_total) ** beta
            total += d_r * weight
    if total <= 0.0:
        raise NoEdges("no edge energy after pooling")
    return total ** (-1.0 / beta)


def sadaka_s(dist: StereoSequence, s_series=None,
             cfg: NrMetricConfig | None = None) -> MetricReport:
    """Foveal just-noticeable-blur sharpness; higher (sharper) is better."""
    cfg = cfg or NrMetricConfig()
    _validate(dist, s_series)
    shape = (dist.height, dist.width)
    scores = []
    for t in range(len(dist)):
        s = _svalues(s_series, t, shape)
        vals = [_sadaka_frame(getattr(dist.frames[t], v).luma, s, cfg) for v in _VIEWS]
        scores.append(0.5 * (vals[0] + vals[1]))
    return make_report("sadaka_s", scores, "higher_better",
                       _saliency_mode(s_series), cfg)


def vqsm_s(dist: StereoSequence, s_series=None,
           cfg: NrMetricConfig | None = None) -> MetricReport:
    """Sharpness (gradient magnitude) and smoothness (local std) combined by
    the configured polynomial; the neutral defaults give sharpness minus
    smoothness, higher better."""
    cfg = cfg or NrMetricConfig()
    _validate(dist, s_series)
    shape = (dist.height, dist.width)
    a1, a2, a3, a4, a5 = cfg.vqsm_alphas
    box = Kernel2D(np.full((5, 5), 1.0 / 25.0), normalized=True)
    scores = []
    for t in range(len(dist)):
        s = _svalues(s_series, t, shape)
        s_bar = convolve2d(s, box)
        vals = []
        for view in _VIEWS:
            luma = getattr(dist.frames[t], view).luma
            q_sh = _wmean(sobel_gradient(luma)["magnitude"], s)
            q_sm = _wmean(_local_std(luma, 5), s_bar)
            vals.append(a1 * q_sh**2 + a2 * q_sh + a3 * q_sm**2 + a4 * q_sm + a5)
        scores.append(0.5 * (vals[0] + vals[1]))
    return make_report("vqsm_s", scores, "higher_better", _saliency_mode(s_series), cfg)


_AQI_STEPS = {0: (0, 1), 45: (-1, 1), 90: (1, 0), 135: (1, 1)}


def _aqi_kernel(direction: int) -> Kernel2D:
    dy, dx = _AQI_STEPS[direction]
    taps = np.zeros((7, 7))
    for t in range(-3, 4):
        taps[3 + t * dy, 3 + t * dx] += 1.0 / 7.0
    return Kernel2D(taps, normalized=True)


def _aqi_frame(luma: np.ndarray, s: np.ndarray, cfg: NrMetricConfig) -> float:
    entropies = []
    for direction in cfg.aqi_directions:
        filtered = convolve2d(luma, _aqi_kernel(direction))
        hist, _ = np.histogram(filtered, bins=cfg.aqi_bins, range=(0.0, 255.0),
                               weights=s)
        total = hist.sum()
        if total <= 0:
            entropies.append(0.0)
            continue
        p = hist / total
        p = p[p > 0]
        entropies.append(float(-(p * np.log(p)).sum()))
    return float(np.std(entropies))


def aqi_s(dist: StereoSequence, s_series=None,
          cfg: NrMetricConfig | None = None) -> MetricReport:
    """Spread of directional entropies (saliency-weighted histograms);
    higher anisotropy means less degradation."""
    cfg = cfg or NrMetricConfig()
    _validate(dist, s_series)
    shape = (dist.height, dist.width)
    scores = []
    for t in range(len(dist)):
        s = _svalues(s_series, t, shape)
        vals = [_aqi_frame(getattr(dist.frames[t], v).luma, s, cfg) for v in _VIEWS]
        scores.append(0.5 * (vals[0] + vals[1]))
    return make_report("aqi_s", scores, "higher_better", _saliency_mode(s_series), cfg)


def qa3d_s(dist: StereoSequence, d_dist=None, s_series=None,
           cfg: NrMetricConfig | None = None) -> MetricReport:
    """Temporal disparity consistency plus an interview edge difference;
    scored from frame `history` onward, higher better."""
    cfg = cfg or NrMetricConfig()
    _validate(dist, s_series)
    if d_dist is None:
        raise DisparityRequired("qa3d needs disparity for the distorted pair")
    p = cfg.qa3d_history
    if len(dist) < p + 1:
        raise NeedsTemporalContext(f"needs at least {p + 1} frames")
    shape = (dist.height, dist.width)
    d_index = []
    d_edge = []
    for t in range(len(dist)):
        s = _svalues(s_series, t, shape)
        d = d_dist[t].values if isinstance(d_dist[t], DisparityMap) else np.asarray(d_dist[t])
        thresholded = np.where(d < cfg.qa3d_threshold, 0.0, d)
        d_index.append(_wmean(thresholded, s))
        left = sobel_gradient(dist.frames[t].left.luma)["magnitude"]
        right = sobel_gradient(dist.frames[t].right.luma)["magnitude"]
        d_edge.append(_wmean(np.abs(left - right) / 255.0, s))
    scores = []
    for n in range(p, len(dist)):
        s_m = 0.1 * (sum(d_index[n - p:n]) - d_index[n] * p) * d_index[n]
        scores.append(1.0 - (s_m + d_edge[n]) / 2.0)
    return make_report("qa3d_s", scores, "higher_better", _saliency_mode(s_series), cfg)


def _qjpeg(luma: np.ndarray, s: np.ndarray, cfg: NrMetricConfig):
    g = 8
    comps = {"B": [], "A": [], "Z": []}
    for axis in (1, 0):
        d = np.diff(luma, axis=axis)
        if axis == 1:
            sw = 0.5 * (s[:, 1:] + s[:, :-1])
            boundary = (np.arange(d.shape[1]) + 1) % g == 0
            b_mask = np.zeros(d.shape, bool)
            b_mask[:, boundary] = True
            z = (d[:, 1:] * d[:, :-1]) < 0
            zw = s[:, 1:-1]
        else:
            sw = 0.5 * (s[1:, :] + s[:-1, :])
            boundary = (np.arange(d.shape[0]) + 1) % g == 0
            b_mask = np.zeros(d.shape, bool)
            b_mask[boundary, :] = True
            z = (d[1:, :] * d[:-1, :]) < 0
            zw = s[1:-1, :]
        ad = np.abs(d)
        comps["B"].append(_wmean(ad[b_mask], sw[b_mask]))
        comps["A"].append(_wmean(ad[~b_mask], sw[~b_mask]))
        comps["Z"].append(_wmean(z.astype(float), zw))
    b = 0.5 * sum(comps["B"])
    a = 0.5 * sum(comps["A"])
    z = 0.5 * sum(comps["Z"])
    if b <= 0.0 or a <= 0.0 or z <= 0.0:
        return cfg.nospdm_alpha, True  # degenerate signal, power terms dropped
    q = (cfg.nospdm_alpha + cfg.nospdm_beta
         * b**cfg.nospdm_gamma1 * a**cfg.nospdm_gamma2 * z**cfg.nospdm_gamma3)
    return q, False


def _angle(u: np.ndarray, v: np.ndarray) -> float:
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu <= 0 or nv <= 0:
        return 0.0
    return float(np.arccos(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0)))


def nospdm_s(dist: StereoSequence, s_left=None, s_right=None,
             cfg: NrMetricConfig | None = None) -> MetricReport:
    """Parallax-compensated JPEG sharpness with interview and inter-map angle
    terms; higher better under the reference constants."""
    cfg = cfg or NrMetricConfig()
    _validate(dist, s_left)
    if s_right is None:
        s_right = s_left
    shape = (dist.height, dist.width)
    scores = []
    flags = []
    for t in range(len(dist)):
        sl = _svalues(s_left, t, shape)
        sr = _svalues(s_right, t, shape)
        q_l, deg_l = _qjpeg(dist.frames[t].left.luma, sl, cfg)
        q_r, deg_r = _qjpeg(dist.frames[t].right.luma, sr, cfg)
        if (deg_l or deg_r) and "qjpeg_degenerate" not in flags:
            flags.append("qjpeg_degenerate")
        left = dist.frames[t].left.luma.ravel()
        right = dist.frames[t].right.luma.ravel()
        score = ((2.0 - cfg.nospdm_mu_r) * q_l + cfg.nospdm_mu_r * q_r
                 - cfg.nospdm_lambda * max(q_l, q_r)
                 + _angle(left, right)
                 + cfg.nospdm_omega_s * _angle(sl.ravel(), sr.ravel()))
        scores.append(score)
    return make_report("nospdm_s", scores, "higher_better",
                       _saliency_mode(s_left), cfg, flags)


NR_METRICS = {
    "gbim_s": gbim_s,
    "nrpbm_s": nrpbm_s,
    "blur_farias_s": blur_farias_s,
    "block_farias_s": block_farias_s,
    "sadaka_s": sadaka_s,
    "vqsm_s": vqsm_s,
    "aqi_s": aqi_s,
    "qa3d_s": qa3d_s,
    "nospdm_s": nospdm_s,
}

NR_NEEDS_DISPARITY = {"qa3d_s": ("d_dist",)}
