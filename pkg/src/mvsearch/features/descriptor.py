"""128-dimensional gradient-histogram descriptor (SIFT-style, upright).

A 16x16 grid of gradient samples around the point, spaced by
scale / base_scale pixels, is pooled into 4x4 spatial cells with 8
orientation bins each. Samples are Gaussian-weighted by distance from the
patch center and split linearly between the two nearest orientation bins.
Normalization: L2, clip at 0.2, L2 again; a flat patch yields all zeros.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..errors import PatchOutOfBoundsError
from ..image import validate_gray
from .detect import DetectorConfig, InterestPoint

GRID = 16              # samples per side
CELLS = 4              # spatial cells per side
ORI_BINS = 8
DESCRIPTOR_DIM = CELLS * CELLS * ORI_BINS
CLIP = 0.2
_WEIGHT_SIGMA = GRID / 2.0  # in sample units

# Gaussian weight per sample, fixed in grid coordinates.
_offsets = np.arange(GRID) - (GRID - 1) / 2.0
_WU, _WV = np.meshgrid(_offsets, _offsets)
_WEIGHTS = np.exp(-(_WU**2 + _WV**2) / (2.0 * _WEIGHT_SIGMA**2))


@dataclass(frozen=True)
class Descriptor:
    values: np.ndarray  # (128,) float32, L2 norm 1 or all-zero
    channel: str


def gradient_maps(img: np.ndarray, sigma: float = 1.0):
    """(gx, gy) central-difference gradients of the smoothed image."""
    smoothed = ndimage.gaussian_filter(validate_gray(img), sigma, mode="reflect")
    gy, gx = np.gradient(smoothed)
    return gx, gy


def _bilinear(m: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    x0 = np.floor(xs).astype(np.int64)
    y0 = np.floor(ys).astype(np.int64)
    fx = xs - x0
    fy = ys - y0
    h, w = m.shape
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    return (
        m[y0, x0] * (1 - fx) * (1 - fy)
        + m[y0, x1] * fx * (1 - fy)
        + m[y1, x0] * (1 - fx) * fy
        + m[y1, x1] * fx * fy
    )


def _clamped_center(x: float, y: float, spacing: float, shape) -> tuple[float, float]:
    """Shift the patch center so all samples fall inside the image.

    The shift is capped at one cell width per axis; beyond that the patch
    is rejected rather than padded.
    """
    h, w = shape
    half = (GRID - 1) / 2.0 * spacing
    cell = (GRID / CELLS) * spacing
    eps = 1e-6
    lo_x, hi_x = half, (w - 1) - half - eps
    lo_y, hi_y = half, (h - 1) - half - eps
    if lo_x > hi_x or lo_y > hi_y:
        raise PatchOutOfBoundsError(f"patch of spacing {spacing:.2f} larger than image {w}x{h}")
    cx = min(max(x, lo_x), hi_x)
    cy = min(max(y, lo_y), hi_y)
    if abs(cx - x) > cell or abs(cy - y) > cell:
        raise PatchOutOfBoundsError(
            f"point ({x:.1f}, {y:.1f}) needs a shift beyond one cell to fit its patch"
        )
    return cx, cy


def describe_many(
    img: np.ndarray,
    points: list[InterestPoint],
    cfg: DetectorConfig = DetectorConfig(),
    grads=None,
) -> tuple[np.ndarray, list[InterestPoint]]:
    """Descriptors for all points whose patch fits; out-of-bounds points
    are dropped. Returns (n, 128) float32 plus the kept points."""
    img = validate_gray(img)
    gx, gy = grads if grads is not None else gradient_maps(img, cfg.harris_sigma_d)

    centers = []
    kept = []
    spacings = []
    for pt in points:
        spacing = pt.scale / cfg.base_scale
        try:
            c = _clamped_center(pt.x, pt.y, spacing, img.shape)
        except PatchOutOfBoundsError:
            continue
        centers.append(c)
        spacings.append(spacing)
        kept.append(pt)
    if not kept:
        return np.zeros((0, DESCRIPTOR_DIM), dtype=np.float32), []

    n = len(kept)
    cxs = np.array([c[0] for c in centers])[:, None, None]
    cys = np.array([c[1] for c in centers])[:, None, None]
    sp = np.array(spacings)[:, None, None]
    xs = cxs + _WU[None] * sp
    ys = cys + _WV[None] * sp
    sgx = _bilinear(gx, xs, ys)
    sgy = _bilinear(gy, xs, ys)
    mag = np.hypot(sgx, sgy) * _WEIGHTS[None]
    ang = np.arctan2(sgy, sgx)  # (-pi, pi]

    # Orientation: linear split across the two nearest of 8 bins.
    f = np.mod(ang, 2.0 * np.pi) / (2.0 * np.pi) * ORI_BINS
    b0 = np.floor(f).astype(np.int64) % ORI_BINS
    b1 = (b0 + 1) % ORI_BINS
    w1 = f - np.floor(f)
    w0 = 1.0 - w1

    # Spatial cell per sample (no spatial interpolation).
    cell_idx = (np.arange(GRID) * CELLS) // GRID
    cu = np.broadcast_to(cell_idx[None, None, :], mag.shape)
    cv = np.broadcast_to(cell_idx[None, :, None], mag.shape)

    desc = np.zeros((n, CELLS, CELLS, ORI_BINS))
    pidx = np.broadcast_to(np.arange(n)[:, None, None], mag.shape)
    np.add.at(desc, (pidx, cv, cu, b0), mag * w0)
    np.add.at(desc, (pidx, cv, cu, b1), mag * w1)
    flat = desc.reshape(n, DESCRIPTOR_DIM)

    norms = np.linalg.norm(flat, axis=1, keepdims=True)
    nz = norms[:, 0] > 1e-12
    flat[nz] /= norms[nz]
    np.clip(flat, 0.0, CLIP, out=flat)
    norms = np.linalg.norm(flat, axis=1, keepdims=True)
    nz = norms[:, 0] > 1e-12
    flat[nz] /= norms[nz]
    return flat.astype(np.float32), kept


def describe(img: np.ndarray, pt: InterestPoint, cfg: DetectorConfig = DetectorConfig()) -> Descriptor:
    """Descriptor at one point; raises PatchOutOfBoundsError if its patch
    cannot be clamped into the image."""
    img = validate_gray(img)
    _clamped_center(pt.x, pt.y, pt.scale / cfg.base_scale, img.shape)
    values, kept = describe_many(img, [pt], cfg)
    assert kept, "clamp check above guarantees the point survives"
    return Descriptor(values=values[0], channel=pt.channel)
