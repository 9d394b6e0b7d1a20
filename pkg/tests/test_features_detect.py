"""Interest point detection: response oracles, symmetry, NMS, scales."""

from __future__ import annotations

import numpy as np
import pytest

from mvsearch.errors import ImageTooSmallError
from mvsearch.features.detect import (
    BLOB_RADIUS_FACTOR,
    DetectorConfig,
    detect_blobs,
    detect_corners,
    harris_response,
    hessian_response_stack,
)

CFG = DetectorConfig()


# ---------------------------------------------------------------------------
# independent reference implementations (different code path: explicit
# kernels + manual reflect padding instead of scipy.ndimage)


def _gauss_kernel(sigma: float) -> np.ndarray:
    radius = int(4.0 * sigma + 0.5)
    x = np.arange(-radius, radius + 1, dtype=float)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def _convolve_reflect_1d(row: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    # scipy's "reflect" boundary duplicates the edge sample, which numpy
    # calls "symmetric"
    radius = len(kernel) // 2
    padded = np.pad(row, radius, mode="symmetric")
    return np.convolve(padded, kernel, mode="valid")


def _smooth_reference(img: np.ndarray, sigma: float) -> np.ndarray:
    k = _gauss_kernel(sigma)
    tmp = np.apply_along_axis(_convolve_reflect_1d, 1, img, k)
    return np.apply_along_axis(_convolve_reflect_1d, 0, tmp, k)


def _central_gradients(img: np.ndarray):
    gy = np.empty_like(img)
    gx = np.empty_like(img)
    gy[1:-1, :] = (img[2:, :] - img[:-2, :]) / 2.0
    gy[0, :] = img[1, :] - img[0, :]
    gy[-1, :] = img[-1, :] - img[-2, :]
    gx[:, 1:-1] = (img[:, 2:] - img[:, :-2]) / 2.0
    gx[:, 0] = img[:, 1] - img[:, 0]
    gx[:, -1] = img[:, -1] - img[:, -2]
    return gy, gx


def harris_reference(img: np.ndarray, cfg: DetectorConfig) -> np.ndarray:
    smoothed = _smooth_reference(img, cfg.harris_sigma_d)
    gy, gx = _central_gradients(smoothed)
    a = _smooth_reference(gx * gx, cfg.harris_sigma_i)
    b = _smooth_reference(gy * gy, cfg.harris_sigma_i)
    c = _smooth_reference(gx * gy, cfg.harris_sigma_i)
    det = a * b - c * c
    trace = a + b
    return det - cfg.harris_k * trace * trace


def square_image(size: int = 64, lo: int = 16, hi: int = 48) -> np.ndarray:
    img = np.zeros((size, size))
    img[lo:hi, lo:hi] = 1.0
    return img


# ---------------------------------------------------------------------------
# corners


def test_uniform_image_has_no_corners():
    assert detect_corners(np.full((32, 32), 0.7), CFG) == []


def test_harris_response_matches_reference():
    rng = np.random.default_rng(0)
    img = rng.random((48, 48))
    got = harris_response(img, CFG)
    want = harris_reference(img, CFG)
    np.testing.assert_allclose(got, want, atol=1e-10)


def test_square_corners_found():
    img = square_image()
    pts = detect_corners(img, CFG)
    assert len(pts) >= 4
    true_corners = [(16, 16), (47, 16), (16, 47), (47, 47)]
    for cx, cy in true_corners:
        dists = [np.hypot(p.x - cx, p.y - cy) for p in pts]
        assert min(dists) < 2.0, f"no corner near ({cx},{cy})"
    # sorted by descending response
    responses = [p.response for p in pts]
    assert responses == sorted(responses, reverse=True)
    for p in pts:
        assert p.channel == "corner"
        assert p.response > 0


def test_response_map_rotation_symmetry():
    rng = np.random.default_rng(1)
    img = rng.random((40, 40))
    r = harris_response(img, CFG)
    r_rot = harris_response(np.rot90(img), CFG)
    np.testing.assert_allclose(np.rot90(r), r_rot, atol=1e-6)


def test_detected_corners_map_under_rotation():
    img = square_image()
    pts = detect_corners(img, CFG)
    pts_rot = detect_corners(np.rot90(img), CFG)
    assert len(pts) == len(pts_rot)
    h = img.shape[0]
    # (x, y) -> (y, h-1-x) under one CCW rot90 of the array
    mapped = sorted((p.y, h - 1 - p.x) for p in pts)
    found = sorted((p.x, p.y) for p in pts_rot)
    for (mx, my), (fx, fy) in zip(mapped, found):
        assert np.hypot(mx - fx, my - fy) < 2.0


def test_nms_min_distance_and_cap():
    rng = np.random.default_rng(2)
    img = rng.random((64, 64))
    cfg = DetectorConfig(max_points=10)
    pts = detect_corners(img, cfg)
    assert len(pts) <= 10
    for i, p in enumerate(pts):
        for q in pts[i + 1 :]:
            assert np.hypot(p.x - q.x, p.y - q.y) > cfg.nms_radius


def test_corner_coordinates_in_bounds():
    rng = np.random.default_rng(3)
    img = rng.random((32, 48))
    for p in detect_corners(img, CFG):
        assert 0 <= p.x < 48
        assert 0 <= p.y < 32


def test_image_too_small():
    with pytest.raises(ImageTooSmallError):
        detect_corners(np.ones((8, 40)), CFG)
    with pytest.raises(ImageTooSmallError):
        detect_blobs(np.ones((40, 8)), CFG)


# ---------------------------------------------------------------------------
# blobs


def gaussian_blob(size: int, cx: float, cy: float, sigma: float) -> np.ndarray:
    yy, xx = np.mgrid[0:size, 0:size]
    return np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2.0 * sigma**2))


def test_uniform_image_has_no_blobs():
    assert detect_blobs(np.full((40, 40), 0.3), CFG) == []


def test_single_blob_location_and_scale():
    img = gaussian_blob(64, 32.0, 32.0, 4.0)
    pts = detect_blobs(img, CFG)
    assert len(pts) == 1
    p = pts[0]
    assert np.hypot(p.x - 32.0, p.y - 32.0) < 2.0
    # reported scale ~ sigma*sqrt(2), within one scale step (factor 2^(1/3))
    expected = 4.0 * np.sqrt(2.0)
    step = 2.0 ** (1.0 / CFG.scales_per_octave)
    assert expected / step <= p.scale <= expected * step
    assert p.channel == "blob"


def test_blob_scale_matches_dense_stack_argmax():
    """Oracle: densely evaluate the response stack and take its argmax."""
    img = gaussian_blob(64, 32.0, 32.0, 4.0)
    stack, sigmas = hessian_response_stack(img, CFG)
    s, y, x = np.unravel_index(np.argmax(stack), stack.shape)
    assert (y, x) == (32, 32)
    pts = detect_blobs(img, CFG)
    # detected scale within one refinement step of the dense-argmax scale
    dense_scale = sigmas[s] * BLOB_RADIUS_FACTOR
    step = 2.0 ** (1.0 / CFG.scales_per_octave)
    assert dense_scale / step <= pts[0].scale <= dense_scale * step


def test_two_separated_blobs():
    img = gaussian_blob(96, 24.0, 24.0, 3.0) + gaussian_blob(96, 72.0, 72.0, 5.0)
    pts = detect_blobs(img, CFG)
    assert len(pts) == 2
    centers = sorted((round(p.x), round(p.y)) for p in pts)
    assert centers == [(24, 24), (72, 72)]


def test_blob_detection_deterministic():
    rng = np.random.default_rng(4)
    img = rng.random((48, 48))
    a = detect_blobs(img, CFG)
    b = detect_blobs(img, CFG)
    assert a == b
