"""Binary descriptor-set file format (magic "MVDS").

Layout, little-endian:
  magic "MVDS" | version u16 = 1 | channel-count u16 = 2
  per channel: tag u8 (0 = corner, 1 = blob) | count u32 | dim u16 = 128
               | count * 128 float32, row-major
Trailing bytes after the last channel payload are an error.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from ..errors import FileFormatError
from .descriptor import DESCRIPTOR_DIM
from .detect import BLOB, CORNER

MAGIC = b"MVDS"
VERSION = 1
_CHANNEL_TAGS = {CORNER: 0, BLOB: 1}
_TAG_CHANNELS = {v: k for k, v in _CHANNEL_TAGS.items()}


@dataclass
class DescriptorSet:
    """Per-image descriptors, one float32 (n, 128) block per channel."""

    image_id: str
    corner_descriptors: np.ndarray = field(default_factory=lambda: np.zeros((0, DESCRIPTOR_DIM)))
    blob_descriptors: np.ndarray = field(default_factory=lambda: np.zeros((0, DESCRIPTOR_DIM)))

    def __post_init__(self):
        self.corner_descriptors = _as_block(self.corner_descriptors)
        self.blob_descriptors = _as_block(self.blob_descriptors)

    def channel(self, name: str) -> np.ndarray:
        if name == CORNER:
            return self.corner_descriptors
        if name == BLOB:
            return self.blob_descriptors
        raise ValueError(f"unknown channel {name!r}")

    @property
    def total(self) -> int:
        return len(self.corner_descriptors) + len(self.blob_descriptors)


def _as_block(arr) -> np.ndarray:
    block = np.asarray(arr, dtype=np.float32)
    if block.size == 0:
        return block.reshape(0, DESCRIPTOR_DIM)
    if block.ndim != 2 or block.shape[1] != DESCRIPTOR_DIM:
        raise ValueError(f"descriptor block must be (n, {DESCRIPTOR_DIM}), got {block.shape}")
    return np.ascontiguousarray(block)


def dumps_descriptors(ds: DescriptorSet) -> bytes:
    parts = [MAGIC, struct.pack("<HH", VERSION, 2)]
    for channel in (CORNER, BLOB):
        block = ds.channel(channel)
        parts.append(struct.pack("<BIH", _CHANNEL_TAGS[channel], block.shape[0], DESCRIPTOR_DIM))
        parts.append(block.astype("<f4").tobytes())
    return b"".join(parts)


def save_descriptors(ds: DescriptorSet, path) -> None:
    data = dumps_descriptors(ds)
    with open(path, "wb") as fh:
        fh.write(data)


def loads_descriptors(data: bytes, image_id: str = "") -> DescriptorSet:
    if len(data) < 4 or data[:4] != MAGIC:
        raise FileFormatError("bad-magic", f"expected {MAGIC!r}")
    off = 4
    try:
        version, n_channels = struct.unpack_from("<HH", data, off)
    except struct.error as exc:
        raise FileFormatError("truncated", "header cut short") from exc
    off += 4
    if version != VERSION:
        raise FileFormatError("bad-version", f"version {version}, expected {VERSION}")
    if n_channels != 2:
        raise FileFormatError("corrupt", f"channel count {n_channels}, expected 2")
    blocks = {}
    for _ in range(n_channels):
        try:
            tag, count, dim = struct.unpack_from("<BIH", data, off)
        except struct.error as exc:
            raise FileFormatError("truncated", "channel header cut short") from exc
        off += 7
        if tag not in _TAG_CHANNELS:
            raise FileFormatError("corrupt", f"unknown channel tag {tag}")
        if dim != DESCRIPTOR_DIM:
            raise FileFormatError("corrupt", f"dimension {dim}, expected {DESCRIPTOR_DIM}")
        nbytes = count * dim * 4
        if off + nbytes > len(data):
            raise FileFormatError("truncated", "descriptor payload cut short")
        block = np.frombuffer(data, dtype="<f4", count=count * dim, offset=off).reshape(count, dim)
        blocks[_TAG_CHANNELS[tag]] = block.copy()
        off += nbytes
    if off != len(data):
        raise FileFormatError("trailing", f"{len(data) - off} unexpected trailing bytes")
    if set(blocks) != {CORNER, BLOB}:
        raise FileFormatError("corrupt", "duplicate or missing channel block")
    return DescriptorSet(
        image_id=image_id,
        corner_descriptors=blocks[CORNER],
        blob_descriptors=blocks[BLOB],
    )


def load_descriptors(path, image_id: str | None = None) -> DescriptorSet:
    with open(path, "rb") as fh:
        data = fh.read()
    return loads_descriptors(data, image_id if image_id is not None else str(path))
