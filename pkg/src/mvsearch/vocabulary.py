"""Visual vocabularies: k-means training, quantization, BoW histograms.

One vocabulary per channel (corner, blob). Histograms concatenate the
corner block first, then the blob block, and store raw counts; the
similarity functions apply their own normalization.

Vocabulary file layout (little-endian):
  magic "MVVC" | version u16 | channel u8 (0 = corner, 1 = blob)
  k u32 | dim u16 = 128 | k*128 float32 centroids
  seed u64 | iterations u32 | distortion f64
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import ChannelMismatchError, FileFormatError, TooFewDescriptorsError
from .features.descriptor import DESCRIPTOR_DIM, Descriptor
from .features.detect import BLOB, CHANNELS, CORNER
from .features.io import DescriptorSet
from .kmeans import KMeansConfig, kmeans

MAGIC = b"MVVC"
VERSION = 1
DEFAULT_K = 3000
MAX_TRAIN_SAMPLE = 500_000

_CHANNEL_TAGS = {CORNER: 0, BLOB: 1}
_TAG_CHANNELS = {v: k for k, v in _CHANNEL_TAGS.items()}


@dataclass(frozen=True)
class TrainingMeta:
    seed: int
    iterations: int
    distortion: float


@dataclass
class Vocabulary:
    channel: str
    centroids: np.ndarray           # (k, 128) float64
    meta: TrainingMeta

    def __post_init__(self) -> None:
        if self.channel not in CHANNELS:
            raise ValueError(f"unknown channel {self.channel!r}")
        c = np.ascontiguousarray(self.centroids, dtype=np.float64)
        if c.ndim != 2 or c.shape[1] != DESCRIPTOR_DIM:
            raise ValueError(f"centroids must be (k, {DESCRIPTOR_DIM}), got {c.shape}")
        if c.shape[0] < 1:
            raise ValueError("vocabulary needs at least one centroid")
        if not np.isfinite(c).all():
            raise ValueError("centroids must be finite")
        self.centroids = c

    @property
    def k(self) -> int:
        return self.centroids.shape[0]


def _stack(descriptors: Sequence[Descriptor] | np.ndarray, channel: str | None) -> tuple[np.ndarray, str]:
    """Pool descriptor values into an (n, 128) array, checking channels agree."""
    if isinstance(descriptors, np.ndarray):
        if channel is None:
            raise ValueError("channel required when training from a raw array")
        data = np.ascontiguousarray(descriptors, dtype=np.float64)
        if data.ndim != 2 or data.shape[1] != DESCRIPTOR_DIM:
            raise ValueError(f"expected (n, {DESCRIPTOR_DIM}) array, got {data.shape}")
        return data, channel
    items = list(descriptors)
    if not items:
        raise TooFewDescriptorsError("no descriptors to train on")
    seen = {d.channel for d in items}
    if len(seen) > 1:
        raise ChannelMismatchError(f"mixed channels in training set: {sorted(seen)}")
    ch = items[0].channel
    if channel is not None and channel != ch:
        raise ChannelMismatchError(f"expected channel {channel!r}, got {ch!r}")
    return np.stack([d.values for d in items]).astype(np.float64), ch


def train(
    descriptors: Sequence[Descriptor] | np.ndarray,
    k: int = DEFAULT_K,
    cfg: KMeansConfig = KMeansConfig(),
    channel: str | None = None,
) -> Vocabulary:
    """k-means a descriptor pool into a k-word vocabulary for one channel."""
    data, ch = _stack(descriptors, channel)
    if data.shape[0] < k:
        raise TooFewDescriptorsError(f"{data.shape[0]} descriptors for k={k}")
    if data.shape[0] > MAX_TRAIN_SAMPLE:
        rng = np.random.default_rng(cfg.seed)
        keep = rng.choice(data.shape[0], size=MAX_TRAIN_SAMPLE, replace=False)
        keep.sort()
        data = data[keep]
    result = kmeans(data, k, cfg)
    meta = TrainingMeta(seed=cfg.seed, iterations=result.iterations, distortion=result.distortion)
    return Vocabulary(channel=ch, centroids=result.centroids, meta=meta)


def quantize_many(values: np.ndarray, v: Vocabulary) -> np.ndarray:
    """Nearest-centroid index for each row; ties go to the lowest index."""
    values = np.ascontiguousarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[1] != DESCRIPTOR_DIM:
        raise ValueError(f"expected (n, {DESCRIPTOR_DIM}) array, got {values.shape}")
    return _kernels.quantize_batch(values, v.centroids)


def quantize(d: Descriptor, v: Vocabulary) -> int:
    if d.channel != v.channel:
        raise ChannelMismatchError(f"descriptor channel {d.channel!r} vs vocabulary {v.channel!r}")
    return int(quantize_many(d.values[None, :], v)[0])


def build_bow(ds: DescriptorSet, vc: Vocabulary, vb: Vocabulary) -> np.ndarray:
    """Concatenated histogram: corner counts (k_c bins) then blob counts (k_b bins)."""
    if vc.channel != CORNER:
        raise ChannelMismatchError(f"first vocabulary must be corner, got {vc.channel!r}")
    if vb.channel != BLOB:
        raise ChannelMismatchError(f"second vocabulary must be blob, got {vb.channel!r}")
    bins = np.zeros(vc.k + vb.k, dtype=np.int64)
    if ds.corner_descriptors.shape[0]:
        idx = quantize_many(ds.corner_descriptors, vc)
        np.add.at(bins, idx, 1)
    if ds.blob_descriptors.shape[0]:
        idx = quantize_many(ds.blob_descriptors, vb) + vc.k
        np.add.at(bins, idx, 1)
    return bins


def dumps_vocabulary(v: Vocabulary) -> bytes:
    head = MAGIC + struct.pack("<HBIH", VERSION, _CHANNEL_TAGS[v.channel], v.k, DESCRIPTOR_DIM)
    payload = np.ascontiguousarray(v.centroids, dtype="<f4").tobytes()
    tail = struct.pack("<QId", v.meta.seed, v.meta.iterations, v.meta.distortion)
    return head + payload + tail


def save_vocabulary(v: Vocabulary, path: str | Path) -> None:
    Path(path).write_bytes(dumps_vocabulary(v))


def loads_vocabulary(data: bytes) -> Vocabulary:
    if len(data) < 4 or data[:4] != MAGIC:
        raise FileFormatError("bad-magic", "not a vocabulary file")
    off = 4
    try:
        version, tag, k, dim = struct.unpack_from("<HBIH", data, off)
    except struct.error as exc:
        raise FileFormatError("truncated", "vocabulary header incomplete") from exc
    off += struct.calcsize("<HBIH")
    if version != VERSION:
        raise FileFormatError("bad-version", f"unsupported vocabulary version {version}")
    if tag not in _TAG_CHANNELS:
        raise FileFormatError("corrupt", f"unknown channel tag {tag}")
    if dim != DESCRIPTOR_DIM:
        raise FileFormatError("corrupt", f"descriptor dim {dim} != {DESCRIPTOR_DIM}")
    if k < 1:
        raise FileFormatError("corrupt", "k must be >= 1")
    need = k * dim * 4
    if len(data) < off + need:
        raise FileFormatError("truncated", "centroid payload incomplete")
    cents = np.frombuffer(data, dtype="<f4", count=k * dim, offset=off).reshape(k, dim)
    off += need
    tail_fmt = "<QId"
    try:
        seed, iterations, distortion = struct.unpack_from(tail_fmt, data, off)
    except struct.error as exc:
        raise FileFormatError("truncated", "training metadata incomplete") from exc
    off += struct.calcsize(tail_fmt)
    if off != len(data):
        raise FileFormatError("trailing", f"{len(data) - off} trailing bytes")
    if not np.isfinite(cents).all():
        raise FileFormatError("corrupt", "non-finite centroid values")
    meta = TrainingMeta(seed=seed, iterations=iterations, distortion=distortion)
    return Vocabulary(channel=_TAG_CHANNELS[tag], centroids=cents.astype(np.float64), meta=meta)


def load_vocabulary(path: str | Path) -> Vocabulary:
    return loads_vocabulary(Path(path).read_bytes())


def pool_descriptors(sets: Iterable[DescriptorSet], channel: str) -> np.ndarray:
    """Stack one channel's descriptors from many images into one array."""
    blocks = [s.channel(channel) for s in sets]
    blocks = [b for b in blocks if b.shape[0]]
    if not blocks:
        return np.zeros((0, DESCRIPTOR_DIM), dtype=np.float64)
    return np.concatenate(blocks).astype(np.float64)
