"""Matching-time benchmark.

Times the matching stage only: vector quantization, BoW histogram
construction, similarity computation, fusion, and ranking. Feature
extraction is done once outside the timed region. Each configuration is
also timed against every available kernel backend (compiled extension
and numpy fallback) so the two can be compared, and every row reports
its runtime relative to the single-view baseline of the same backend
and similarity.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

from . import _kernels
from .features.io import DescriptorSet
from .fusion import LATE_KINDS
from .index import FUSION_KINDS, FUSION_NONE, IndexStore, QuerySpec, query, query_histograms

DEFAULT_FUSIONS = (FUSION_NONE, "sum", "maximum") + LATE_KINDS


@dataclass(frozen=True)
class BenchRow:
    backend: str
    similarity: str
    fusion: str
    views: int
    mean_ms: float
    ratio_vs_single: float


def _time_once(store: IndexStore, sets: Sequence[DescriptorSet], spec_args: dict) -> float:
    t0 = time.perf_counter()
    hists = query_histograms(store, sets)
    query(store, QuerySpec(hists=hists, **spec_args))
    return (time.perf_counter() - t0) * 1000.0


def _mean_ms(store, sets, spec_args, repeat: int) -> float:
    times = [_time_once(store, sets, spec_args) for _ in range(repeat)]
    return sum(times) / len(times)


def run_bench(
    store: IndexStore,
    query_sets: Sequence[DescriptorSet],
    similarity: str,
    fusions: Sequence[str] = DEFAULT_FUSIONS,
    repeat: int = 3,
    k: int = 10,
    list_depth: int = 100,
    backends: Sequence[str] | None = None,
) -> list[BenchRow]:
    """One row per (backend, fusion); fusion "none" rows are the baseline."""
    if not query_sets:
        raise ValueError("need at least one query descriptor set")
    for f in fusions:
        if f not in FUSION_KINDS:
            raise ValueError(f"unknown fusion {f!r}")
    if backends is None:
        backends = _kernels.available_backends()
    previous = _kernels.active_backend()
    rows: list[BenchRow] = []
    try:
        for backend in backends:
            _kernels.set_backend(backend)
            single_args = dict(similarity=similarity, fusion=FUSION_NONE, k=k, list_depth=list_depth)
            # warm-up excluded from the mean
            _time_once(store, query_sets[:1], single_args)
            single_ms = _mean_ms(store, query_sets[:1], single_args, repeat)
            rows.append(
                BenchRow(
                    backend=backend,
                    similarity=similarity,
                    fusion=FUSION_NONE,
                    views=1,
                    mean_ms=single_ms,
                    ratio_vs_single=1.0,
                )
            )
            for fusion in fusions:
                if fusion == FUSION_NONE:
                    continue
                args = dict(similarity=similarity, fusion=fusion, k=k, list_depth=list_depth)
                mean_ms = _mean_ms(store, query_sets, args, repeat)
                rows.append(
                    BenchRow(
                        backend=backend,
                        similarity=similarity,
                        fusion=fusion,
                        views=len(query_sets),
                        mean_ms=mean_ms,
                        ratio_vs_single=mean_ms / single_ms if single_ms > 0 else float("inf"),
                    )
                )
    finally:
        _kernels.set_backend(previous)
    return rows


def format_csv(rows: Sequence[BenchRow]) -> str:
    lines = ["backend,similarity,fusion,views,mean_ms,ratio_vs_single"]
    for r in rows:
        lines.append(
            f"{r.backend},{r.similarity},{r.fusion},{r.views},"
            f"{r.mean_ms:.3f},{r.ratio_vs_single:.3f}"
        )
    return "\n".join(lines) + "\n"
