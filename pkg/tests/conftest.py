"""Shared fixtures: synthetic descriptor sets, small stores, test images."""

from __future__ import annotations

import numpy as np
import pytest
from PIL import Image

from mvsearch import _kernels
from mvsearch.features.io import DescriptorSet
from mvsearch.index import BuildConfig, IndexStore, build_store_from_descriptors


@pytest.fixture(params=_kernels.available_backends())
def backend(request):
    """Run the decorated test once per importable kernel backend."""
    previous = _kernels.active_backend()
    _kernels.set_backend(request.param)
    yield request.param
    _kernels.set_backend(previous)


def make_descriptor_set(rng, center: float, n: int = 20, image_id: str = "img") -> DescriptorSet:
    """Descriptors clustered around per-object locations in descriptor space."""
    corner = rng.normal(center, 0.05, size=(n, 128)).clip(0, None).astype(np.float32)
    blob = rng.normal(1.0 - center, 0.05, size=(n, 128)).clip(0, None).astype(np.float32)
    return DescriptorSet(image_id=image_id, corner_descriptors=corner, blob_descriptors=blob)


def make_store(
    seed: int = 0,
    n_objects: int = 4,
    n_views: int = 3,
    k: int = 8,
    n_desc: int = 20,
) -> IndexStore:
    rng = np.random.default_rng(seed)
    entries = []
    for i in range(n_objects):
        center = (i + 1) / (n_objects + 1)
        views = [
            (f"v{j}", f"mem://{i}/{j}", make_descriptor_set(rng, center, n=n_desc))
            for j in range(n_views)
        ]
        entries.append((f"obj{i:02d}", f"cat{i % 2}", views))
    cfg = BuildConfig(k_corner=k, k_blob=k, seed=seed)
    return build_store_from_descriptors(entries, cfg)


@pytest.fixture
def small_store() -> IndexStore:
    return make_store()


def checker_image(rng, size: int = 64, n_squares: int = 5) -> np.ndarray:
    """Gray image with random bright rectangles; enough corners to describe."""
    img = np.zeros((size, size))
    for _ in range(n_squares):
        y, x = rng.integers(4, size - 20, size=2)
        h, w = rng.integers(8, 16, size=2)
        img[y : y + h, x : x + w] = rng.uniform(0.4, 1.0)
    return img


def write_png(path, img: np.ndarray) -> None:
    arr = np.clip(img * 255.0, 0, 255).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path)
