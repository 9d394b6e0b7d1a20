"""Object store and query planner.

An IndexStore holds a corner/blob vocabulary pair plus object records,
each with one or more view histograms. `query` dispatches the four
query/database cardinality cases:

  single        M=1 query histogram; an object's score is the max
                similarity over its views
  early fusion  combine the M query histograms bin-wise, then as single
  late set_*    reduce each object's M x N score matrix to a scalar
  late image    fuse M per-query rankings over the flattened view
                universe, then collapse each object to its best view

All modes return a ResultList (descending score, ties by ascending
object_id, at most k entries, unique object ids).

Store file layout (little-endian, strings u16-length-prefixed UTF-8):
  magic "MVIX" | version u16 | meta JSON string
  2 x (u32 block length | vocabulary block, corner first)
  u32 object count, then per object:
    object_id | category | u32 view count, then per view:
      view_id | source path | u32 bin count | bins as u32
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateObjectIdError,
    EmptyStoreError,
    FileFormatError,
    SpecInvalidError,
)
from .features import DetectorConfig, extract
from .features.io import DescriptorSet
from .fusion import (
    EARLY_KINDS,
    LATE_IMAGE_KINDS,
    LATE_KINDS,
    LATE_SET_KINDS,
    DEFAULT_LIST_DEPTH,
    ResultEntry,
    early_fuse,
    fuse_image_rankings,
    rank_entries,
    set_similarity,
)
from .image import load_image
from .kmeans import KMeansConfig
from .similarity import KINDS as SIMILARITY_KINDS
from .similarity import similarity_to_many
from .vocabulary import (
    Vocabulary,
    build_bow,
    dumps_vocabulary,
    loads_vocabulary,
    pool_descriptors,
    train,
)

MAGIC = b"MVIX"
VERSION = 1

FUSION_NONE = "none"
FUSION_KINDS = (FUSION_NONE,) + EARLY_KINDS + LATE_KINDS


@dataclass(frozen=True)
class ObjectView:
    view_id: str
    histogram: np.ndarray          # (bins,) int64 raw counts
    source: str = ""


@dataclass
class ObjectRecord:
    object_id: str
    category: str
    views: list[ObjectView]

    def __post_init__(self) -> None:
        if not self.views:
            raise ValueError(f"object {self.object_id!r} has no views")
        seen = [v.view_id for v in self.views]
        if len(set(seen)) != len(seen):
            raise ValueError(f"object {self.object_id!r} has duplicate view ids")


@dataclass(frozen=True)
class StoreMeta:
    """Build configuration snapshot; deliberately carries no wall-clock
    timestamp so that a fixed-seed rebuild is byte-identical."""

    seed: int = 0
    config: dict = field(default_factory=dict)


@dataclass
class IndexStore:
    corner_vocab: Vocabulary
    blob_vocab: Vocabulary
    records: list[ObjectRecord]
    meta: StoreMeta = field(default_factory=StoreMeta)

    def __post_init__(self) -> None:
        bins = self.corner_vocab.k + self.blob_vocab.k
        ids = set()
        for rec in self.records:
            if rec.object_id in ids:
                raise DuplicateObjectIdError(rec.object_id)
            ids.add(rec.object_id)
            for view in rec.views:
                if view.histogram.shape != (bins,):
                    raise ValueError(
                        f"view {rec.object_id}/{view.view_id}: histogram length "
                        f"{view.histogram.shape} != vocabulary bins {bins}"
                    )
        self._flat = None

    @property
    def bins(self) -> int:
        return self.corner_vocab.k + self.blob_vocab.k

    @property
    def n_views(self) -> int:
        return sum(len(r.views) for r in self.records)

    def record(self, object_id: str) -> ObjectRecord:
        for rec in self.records:
            if rec.object_id == object_id:
                return rec
        raise KeyError(object_id)

    def flat_views(self):
        """(matrix of all view histograms, list of (object_id, view_id) keys,
        object_id -> (category, row indices))."""
        if self._flat is None:
            keys: list[tuple[str, str]] = []
            rows: list[np.ndarray] = []
            groups: dict[str, tuple[str, list[int]]] = {}
            for rec in self.records:
                idx: list[int] = []
                for view in rec.views:
                    idx.append(len(rows))
                    keys.append((rec.object_id, view.view_id))
                    rows.append(view.histogram)
                groups[rec.object_id] = (rec.category, idx)
            matrix = (
                np.ascontiguousarray(np.stack(rows), dtype=np.float64)
                if rows
                else np.zeros((0, self.bins))
            )
            self._flat = (matrix, keys, groups)
        return self._flat


@dataclass
class QuerySpec:
    hists: np.ndarray              # (M, bins)
    similarity: str
    fusion: str = FUSION_NONE      # "none" | early kind | late kind
    k: int = 10
    list_depth: int = DEFAULT_LIST_DEPTH

    def __post_init__(self) -> None:
        self.hists = np.atleast_2d(np.asarray(self.hists, dtype=np.float64))

    @property
    def m(self) -> int:
        return self.hists.shape[0]


def _validate_spec(store: IndexStore, spec: QuerySpec) -> None:
    if not store.records:
        raise EmptyStoreError("store has no objects")
    if spec.similarity not in SIMILARITY_KINDS:
        raise SpecInvalidError(
            f"unknown similarity {spec.similarity!r}; valid: {', '.join(SIMILARITY_KINDS)}"
        )
    if spec.fusion not in FUSION_KINDS:
        raise SpecInvalidError(
            f"unknown fusion {spec.fusion!r}; valid: {', '.join(FUSION_KINDS)}"
        )
    if spec.hists.ndim != 2 or spec.m < 1:
        raise SpecInvalidError("query needs at least one histogram")
    if spec.hists.shape[1] != store.bins:
        raise SpecInvalidError(
            f"query histogram length {spec.hists.shape[1]} != store bins {store.bins}"
        )
    if spec.fusion == FUSION_NONE and spec.m != 1:
        raise SpecInvalidError("fusion 'none' requires exactly one query histogram")
    if spec.k < 1:
        raise SpecInvalidError("k must be >= 1")
    if spec.list_depth < 1:
        raise SpecInvalidError("list_depth must be >= 1")


def score_rows(store: IndexStore, hists: np.ndarray, kind: str) -> list[np.ndarray]:
    """One score vector per query histogram against every stored view.

    This is the per-view matching step shared by batch queries and
    incremental service sessions; both paths must produce bit-identical
    rows for the equivalence guarantee to hold.
    """
    matrix, _, _ = store.flat_views()
    return [similarity_to_many(h, matrix, kind) for h in np.atleast_2d(hists)]


def rank_single(store: IndexStore, row: np.ndarray, k: int) -> list[ResultEntry]:
    """Object score = max over the object's views of one score vector."""
    _, _, groups = store.flat_views()
    scores = {oid: float(row[idx].max()) for oid, (_, idx) in groups.items()}
    return rank_entries(scores, k)


def rank_late_set(
    store: IndexStore, rows: Sequence[np.ndarray], kind: str, k: int
) -> list[ResultEntry]:
    _, _, groups = store.flat_views()
    table = np.stack(rows)
    scores = {
        oid: set_similarity(table[:, idx], kind) for oid, (_, idx) in groups.items()
    }
    return rank_entries(scores, k)


def rank_late_image(
    store: IndexStore, rows: Sequence[np.ndarray], kind: str, k: int, list_depth: int
) -> list[ResultEntry]:
    _, keys, _ = store.flat_views()
    image_ids = [f"{oid}/{vid}" for oid, vid in keys]
    owners = {img: oid for img, (oid, _) in zip(image_ids, keys)}
    lists = [dict(zip(image_ids, row)) for row in rows]
    fused = fuse_image_rankings(lists, kind, k=len(image_ids), list_depth=list_depth)
    object_scores: dict[str, float] = {}
    for entry in fused:
        oid = owners[entry.object_id]
        if oid not in object_scores:
            object_scores[oid] = entry.score
    return rank_entries(object_scores, k)


def query(store: IndexStore, spec: QuerySpec) -> list[ResultEntry]:
    _validate_spec(store, spec)
    if spec.fusion == FUSION_NONE:
        rows = score_rows(store, spec.hists, spec.similarity)
        return rank_single(store, rows[0], spec.k)
    if spec.fusion in EARLY_KINDS:
        combined = early_fuse(list(spec.hists), spec.fusion)
        rows = score_rows(store, combined, spec.similarity)
        return rank_single(store, rows[0], spec.k)
    rows = score_rows(store, spec.hists, spec.similarity)
    if spec.fusion in LATE_SET_KINDS:
        return rank_late_set(store, rows, spec.fusion, spec.k)
    return rank_late_image(store, rows, spec.fusion, spec.k, spec.list_depth)


# ---------------------------------------------------------------------------
# building


@dataclass(frozen=True)
class BuildConfig:
    k_corner: int = 3000
    k_blob: int = 3000
    seed: int = 0
    detector: DetectorConfig = field(default_factory=DetectorConfig)

    def snapshot(self) -> dict:
        det = self.detector
        return {
            "k_corner": self.k_corner,
            "k_blob": self.k_blob,
            "seed": self.seed,
            "detector": {
                "harris_k": det.harris_k,
                "harris_sigma_d": det.harris_sigma_d,
                "harris_sigma_i": det.harris_sigma_i,
                "rel_threshold": det.rel_threshold,
                "nms_radius": det.nms_radius,
                "max_points": det.max_points,
                "base_scale": det.base_scale,
                "n_scales": det.n_scales,
                "scales_per_octave": det.scales_per_octave,
            },
        }


def build_store_from_descriptors(
    entries: Iterable[tuple[str, str, list[tuple[str, str, DescriptorSet]]]],
    cfg: BuildConfig,
) -> IndexStore:
    """Build a store from pre-extracted descriptors.

    `entries` yields (object_id, category, [(view_id, source, DescriptorSet)]).
    """
    entries = list(entries)
    seen: set[str] = set()
    for oid, _, _ in entries:
        if oid in seen:
            raise DuplicateObjectIdError(oid)
        seen.add(oid)
    all_sets = [ds for _, _, views in entries for _, _, ds in views]
    kcfg = KMeansConfig(seed=cfg.seed)
    corner_vocab = train(
        pool_descriptors(all_sets, "corner"), cfg.k_corner, kcfg, channel="corner"
    )
    blob_vocab = train(
        pool_descriptors(all_sets, "blob"), cfg.k_blob, kcfg, channel="blob"
    )
    records = []
    for oid, category, views in entries:
        obj_views = [
            ObjectView(
                view_id=vid,
                histogram=build_bow(ds, corner_vocab, blob_vocab),
                source=source,
            )
            for vid, source, ds in views
        ]
        records.append(ObjectRecord(object_id=oid, category=category, views=obj_views))
    meta = StoreMeta(seed=cfg.seed, config=cfg.snapshot())
    return IndexStore(
        corner_vocab=corner_vocab, blob_vocab=blob_vocab, records=records, meta=meta
    )


def build_store(manifest, cfg: BuildConfig) -> IndexStore:
    """Extract features for every object view in the manifest, train the
    vocabulary pair, and build all view histograms."""
    entries = []
    for obj in manifest.objects:
        views = []
        for i, path in enumerate(obj.views):
            img = load_image(path)
            ds = extract(img, cfg.detector, image_id=str(path))
            views.append((f"v{i}", str(path), ds))
        entries.append((obj.object_id, obj.category, views))
    return build_store_from_descriptors(entries, cfg)


def query_histograms(store: IndexStore, sets: Sequence[DescriptorSet]) -> np.ndarray:
    """Histograms for query descriptor sets against the store's vocabularies."""
    return np.stack(
        [build_bow(ds, store.corner_vocab, store.blob_vocab) for ds in sets]
    ).astype(np.float64)


# ---------------------------------------------------------------------------
# persistence


def _pack_str(s: str) -> bytes:
    raw = s.encode("utf-8")
    if len(raw) > 0xFFFF:
        raise ValueError(f"string too long to serialize ({len(raw)} bytes)")
    return struct.pack("<H", len(raw)) + raw


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.off = 0

    def take(self, fmt: str):
        try:
            vals = struct.unpack_from(fmt, self.data, self.off)
        except struct.error as exc:
            raise FileFormatError("truncated", "store file ends early") from exc
        self.off += struct.calcsize(fmt)
        return vals

    def take_bytes(self, n: int) -> bytes:
        if self.off + n > len(self.data):
            raise FileFormatError("truncated", "store file ends early")
        out = self.data[self.off : self.off + n]
        self.off += n
        return out

    def take_str(self) -> str:
        (n,) = self.take("<H")
        raw = self.take_bytes(n)
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FileFormatError("corrupt", "invalid UTF-8 string") from exc


def dumps_store(store: IndexStore) -> bytes:
    parts = [MAGIC, struct.pack("<H", VERSION)]
    meta = json.dumps(
        {"seed": store.meta.seed, "config": store.meta.config},
        sort_keys=True,
        separators=(",", ":"),
    )
    parts.append(_pack_str(meta))
    for vocab in (store.corner_vocab, store.blob_vocab):
        block = dumps_vocabulary(vocab)
        parts.append(struct.pack("<I", len(block)))
        parts.append(block)
    parts.append(struct.pack("<I", len(store.records)))
    for rec in store.records:
        parts.append(_pack_str(rec.object_id))
        parts.append(_pack_str(rec.category))
        parts.append(struct.pack("<I", len(rec.views)))
        for view in rec.views:
            hist = np.asarray(view.histogram)
            if (hist < 0).any() or hist.max(initial=0) > 0xFFFFFFFF:
                raise ValueError("histogram bins must fit u32")
            parts.append(_pack_str(view.view_id))
            parts.append(_pack_str(view.source))
            parts.append(struct.pack("<I", hist.shape[0]))
            parts.append(np.ascontiguousarray(hist, dtype="<u4").tobytes())
    return b"".join(parts)


def save_store(store: IndexStore, path: str | Path) -> None:
    Path(path).write_bytes(dumps_store(store))


def loads_store(data: bytes) -> IndexStore:
    if len(data) < 4 or data[:4] != MAGIC:
        raise FileFormatError("bad-magic", "not a store file")
    r = _Reader(data)
    r.off = 4
    (version,) = r.take("<H")
    if version != VERSION:
        raise FileFormatError("bad-version", f"unsupported store version {version}")
    try:
        meta_raw = json.loads(r.take_str())
    except json.JSONDecodeError as exc:
        raise FileFormatError("corrupt", "metadata is not valid JSON") from exc
    vocabs = []
    for _ in range(2):
        (n,) = r.take("<I")
        vocabs.append(loads_vocabulary(r.take_bytes(n)))
    if vocabs[0].channel != "corner" or vocabs[1].channel != "blob":
        raise FileFormatError("corrupt", "vocabulary blocks in wrong channel order")
    bins = vocabs[0].k + vocabs[1].k
    (n_objects,) = r.take("<I")
    records = []
    for _ in range(n_objects):
        oid = r.take_str()
        category = r.take_str()
        (n_views,) = r.take("<I")
        if n_views < 1:
            raise FileFormatError("corrupt", f"object {oid!r} has no views")
        views = []
        for _ in range(n_views):
            vid = r.take_str()
            source = r.take_str()
            (n_bins,) = r.take("<I")
            if n_bins != bins:
                raise FileFormatError(
                    "corrupt", f"view {oid}/{vid}: {n_bins} bins, expected {bins}"
                )
            hist = np.frombuffer(r.take_bytes(4 * n_bins), dtype="<u4")
            views.append(
                ObjectView(view_id=vid, histogram=hist.astype(np.int64), source=source)
            )
        records.append(ObjectRecord(object_id=oid, category=category, views=views))
    if r.off != len(data):
        raise FileFormatError("trailing", f"{len(data) - r.off} trailing bytes")
    meta = StoreMeta(seed=int(meta_raw.get("seed", 0)), config=meta_raw.get("config", {}))
    try:
        return IndexStore(
            corner_vocab=vocabs[0], blob_vocab=vocabs[1], records=records, meta=meta
        )
    except (DuplicateObjectIdError, ValueError) as exc:
        raise FileFormatError("corrupt", str(exc)) from exc


def load_store(path: str | Path) -> IndexStore:
    return loads_store(Path(path).read_bytes())
