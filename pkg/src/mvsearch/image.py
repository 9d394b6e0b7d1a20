"""Grayscale image loading and validation.

A grayscale image is a 2-D float64 array with intensities in [0, 1],
row-major (``img[y, x]``). Color inputs are reduced with the usual luma
weights (0.299, 0.587, 0.114).
"""

from __future__ import annotations

import io

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DataError

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


def to_gray(rgb: np.ndarray) -> np.ndarray:
    """Convert an (H, W, 3) array (uint8 or float in [0,1]) to grayscale."""
    arr = np.asarray(rgb, dtype=np.float64)
    if arr.ndim == 2:
        gray = arr
    elif arr.ndim == 3 and arr.shape[2] in (3, 4):
        gray = arr[:, :, :3] @ LUMA_WEIGHTS
    else:
        raise DataError(f"unsupported image shape {arr.shape}")
    if np.issubdtype(np.asarray(rgb).dtype, np.integer):
        gray = gray / 255.0
    return np.clip(gray, 0.0, 1.0)


def load_image(path) -> np.ndarray:
    """Load an image file into a grayscale array."""
    with Image.open(path) as im:
        rgb = np.asarray(im.convert("RGB"))
    return to_gray(rgb)


def decode_image(data: bytes) -> np.ndarray:
    """Decode raw image bytes (PNG/JPEG/...) into a grayscale array."""
    try:
        with Image.open(io.BytesIO(data)) as im:
            rgb = np.asarray(im.convert("RGB"))
    except UnidentifiedImageError as exc:
        raise DataError("unrecognized image payload") from exc
    return to_gray(rgb)


def validate_gray(img: np.ndarray) -> np.ndarray:
    """Check grayscale-image invariants; returns the array as float64."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise DataError(f"grayscale image must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DataError("empty image")
    if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
        raise DataError("intensities must be finite and in [0, 1]")
    return arr
