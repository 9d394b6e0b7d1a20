"""Interest point detection: Harris corners and determinant-of-Hessian blobs.

Both channels produce :class:`InterestPoint` lists sorted by descending
response, capped at ``max_points``, with greedy non-maximum suppression so
no two returned points of a channel lie within ``nms_radius`` of each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..errors import ImageTooSmallError
from ..image import validate_gray

CORNER = "corner"
BLOB = "blob"
CHANNELS = (CORNER, BLOB)

MIN_IMAGE_SIDE = 16


@dataclass(frozen=True)
class InterestPoint:
    x: float
    y: float
    scale: float
    response: float
    channel: str


@dataclass(frozen=True)
class DetectorConfig:
    harris_k: float = 0.04
    harris_sigma_d: float = 1.0       # derivative pre-smoothing
    harris_sigma_i: float = 1.5       # structure-tensor integration
    rel_threshold: float = 1e-4       # of the max response, per channel
    nms_radius: float = 4.0
    max_points: int = 1000
    base_scale: float = 1.6           # sigma of the first blob level
    n_scales: int = 9
    scales_per_octave: int = 3

    def blob_sigmas(self) -> np.ndarray:
        i = np.arange(self.n_scales)
        return self.base_scale * 2.0 ** (i / self.scales_per_octave)


def _check_size(img: np.ndarray):
    if img.shape[0] < MIN_IMAGE_SIDE or img.shape[1] < MIN_IMAGE_SIDE:
        raise ImageTooSmallError(
            f"image {img.shape[1]}x{img.shape[0]} below minimum {MIN_IMAGE_SIDE}x{MIN_IMAGE_SIDE}"
        )


def harris_response(img: np.ndarray, cfg: DetectorConfig = DetectorConfig()) -> np.ndarray:
    """Harris response map R = det(M) - k * trace(M)^2.

    M is the structure tensor of luma gradients, smoothed with an isotropic
    Gaussian, so the map commutes with 90-degree rotations of the input.
    """
    img = validate_gray(img)
    smoothed = ndimage.gaussian_filter(img, cfg.harris_sigma_d, mode="reflect")
    gy, gx = np.gradient(smoothed)
    sxx = ndimage.gaussian_filter(gx * gx, cfg.harris_sigma_i, mode="reflect")
    syy = ndimage.gaussian_filter(gy * gy, cfg.harris_sigma_i, mode="reflect")
    sxy = ndimage.gaussian_filter(gx * gy, cfg.harris_sigma_i, mode="reflect")
    det = sxx * syy - sxy * sxy
    trace = sxx + syy
    return det - cfg.harris_k * trace * trace


def hessian_response_stack(img: np.ndarray, cfg: DetectorConfig = DetectorConfig()):
    """Scale-normalized determinant-of-Hessian responses.

    Returns (stack, sigmas) where stack[i] is sigma_i^4 * det(Hessian) of
    the image smoothed at sigma_i.
    """
    img = validate_gray(img)
    sigmas = cfg.blob_sigmas()
    stack = np.empty((len(sigmas),) + img.shape)
    for i, s in enumerate(sigmas):
        lyy = ndimage.gaussian_filter(img, s, order=(2, 0), mode="reflect")
        lxx = ndimage.gaussian_filter(img, s, order=(0, 2), mode="reflect")
        lxy = ndimage.gaussian_filter(img, s, order=(1, 1), mode="reflect")
        stack[i] = s**4 * (lxx * lyy - lxy * lxy)
    return stack, sigmas


def _parabolic_offset(lo: float, mid: float, hi: float) -> float:
    """Sub-sample peak offset from three samples; clamped to [-0.5, 0.5]."""
    denom = lo - 2.0 * mid + hi
    if denom >= 0.0:  # not a strict local max in this axis
        return 0.0
    return float(np.clip(0.5 * (lo - hi) / denom, -0.5, 0.5))


def _greedy_nms(cands: list, radius: float, max_points: int) -> list:
    """Keep highest-response candidates with pairwise distance > radius.

    ``cands`` entries are (response, y, x, payload); ties order by (y, x).
    """
    order = sorted(cands, key=lambda c: (-c[0], c[1], c[2]))
    kept: list = []
    kx = np.empty(0)
    ky = np.empty(0)
    r2 = radius * radius
    for resp, y, x, payload in order:
        if kept:
            d2 = (kx - x) ** 2 + (ky - y) ** 2
            if d2.min() <= r2:
                continue
        kept.append(payload)
        kx = np.append(kx, x)
        ky = np.append(ky, y)
        if len(kept) >= max_points:
            break
    return kept


def _strict_local_max(arr: np.ndarray) -> np.ndarray:
    """True where a sample strictly exceeds all its neighbors.

    Strictness matters: flat regions (constant response up to float noise)
    must yield no detections.
    """
    footprint = np.ones((3,) * arr.ndim, dtype=bool)
    footprint[(1,) * arr.ndim] = False
    neighbor_max = ndimage.maximum_filter(
        arr, footprint=footprint, mode="constant", cval=-np.inf
    )
    return arr > neighbor_max


def detect_corners(img: np.ndarray, cfg: DetectorConfig = DetectorConfig()) -> list[InterestPoint]:
    """Thresholded local maxima of the Harris response, NMS-filtered."""
    img = validate_gray(img)
    _check_size(img)
    r = harris_response(img, cfg)
    rmax = r.max()
    if rmax <= 0.0:
        return []
    thresh = cfg.rel_threshold * rmax
    ys, xs = np.nonzero(_strict_local_max(r) & (r > thresh))
    h, w = r.shape
    cands = []
    for y, x in zip(ys.tolist(), xs.tolist()):
        resp = float(r[y, x])
        dx = dy = 0.0
        if 0 < x < w - 1:
            dx = _parabolic_offset(r[y, x - 1], resp, r[y, x + 1])
        if 0 < y < h - 1:
            dy = _parabolic_offset(r[y - 1, x], resp, r[y + 1, x])
        px, py = x + dx, y + dy
        pt = InterestPoint(x=px, y=py, scale=cfg.base_scale, response=resp, channel=CORNER)
        cands.append((resp, py, px, pt))
    return _greedy_nms(cands, cfg.nms_radius, cfg.max_points)


# Reported blob scale is the characteristic radius sqrt(2) * sigma of the
# best-responding smoothing level, which matches the size of a Gaussian
# blob of standard deviation sigma.
BLOB_RADIUS_FACTOR = float(np.sqrt(2.0))


def detect_blobs(img: np.ndarray, cfg: DetectorConfig = DetectorConfig()) -> list[InterestPoint]:
    """Thresholded 3-D (x, y, scale) local maxima of the normalized
    determinant-of-Hessian stack; first and last scale levels only serve
    as comparison neighbors."""
    img = validate_gray(img)
    _check_size(img)
    stack, sigmas = hessian_response_stack(img, cfg)
    smax = stack.max()
    if smax <= 0.0:
        return []
    thresh = cfg.rel_threshold * smax
    localmax = _strict_local_max(stack)
    localmax[0] = False
    localmax[-1] = False
    ss, ys, xs = np.nonzero(localmax & (stack > thresh))
    h, w = img.shape
    log_step = np.log(2.0) / cfg.scales_per_octave
    cands = []
    for s, y, x in zip(ss.tolist(), ys.tolist(), xs.tolist()):
        if not (0 < x < w - 1 and 0 < y < h - 1):
            continue
        resp = float(stack[s, y, x])
        dx = _parabolic_offset(stack[s, y, x - 1], resp, stack[s, y, x + 1])
        dy = _parabolic_offset(stack[s, y - 1, x], resp, stack[s, y + 1, x])
        ds = _parabolic_offset(stack[s - 1, y, x], resp, stack[s + 1, y, x])
        sigma = float(sigmas[s] * np.exp(ds * log_step))
        pt = InterestPoint(
            x=x + dx, y=y + dy, scale=BLOB_RADIUS_FACTOR * sigma, response=resp, channel=BLOB
        )
        cands.append((resp, y + dy, x + dx, pt))
    return _greedy_nms(cands, cfg.nms_radius, cfg.max_points)
