"""Local feature extraction: dual-channel detection plus description."""

from __future__ import annotations

import numpy as np

from ..image import validate_gray
from .descriptor import DESCRIPTOR_DIM, Descriptor, describe, describe_many, gradient_maps
from .detect import (
    BLOB,
    CHANNELS,
    CORNER,
    DetectorConfig,
    InterestPoint,
    detect_blobs,
    detect_corners,
    harris_response,
    hessian_response_stack,
)
from .io import (
    DescriptorSet,
    dumps_descriptors,
    load_descriptors,
    loads_descriptors,
    save_descriptors,
)

__all__ = [
    "BLOB",
    "CHANNELS",
    "CORNER",
    "DESCRIPTOR_DIM",
    "Descriptor",
    "DescriptorSet",
    "DetectorConfig",
    "InterestPoint",
    "describe",
    "describe_many",
    "detect_blobs",
    "detect_corners",
    "dumps_descriptors",
    "extract",
    "gradient_maps",
    "harris_response",
    "hessian_response_stack",
    "load_descriptors",
    "loads_descriptors",
    "save_descriptors",
]


def extract(img: np.ndarray, cfg: DetectorConfig = DetectorConfig(), image_id: str = "") -> DescriptorSet:
    """Detect corners and blobs, describe every surviving point.

    Points whose descriptor patch cannot be clamped into the image are
    silently dropped.
    """
    img = validate_gray(img)
    grads = gradient_maps(img, cfg.harris_sigma_d)
    corner_pts = detect_corners(img, cfg)
    blob_pts = detect_blobs(img, cfg)
    corner_desc, _ = describe_many(img, corner_pts, cfg, grads=grads)
    blob_desc, _ = describe_many(img, blob_pts, cfg, grads=grads)
    return DescriptorSet(
        image_id=image_id,
        corner_descriptors=corner_desc,
        blob_descriptors=blob_desc,
    )
