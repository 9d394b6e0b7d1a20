"""Early and late fusion of multi-view representations.

Early fusion combines M query histograms bin-wise (sum, average,
maximum) before a single similarity evaluation.

Late fusion combines scores. Image-level kinds aggregate M per-query
result lists over a shared universe of database images; set-level kinds
reduce the M x N score matrix of one (query set, object) pair to a
scalar.

ResultList convention used throughout the package: entries sorted by
strictly descending score, ties broken by ascending object_id, truncated
to k, no duplicate ids. Rank-keyed kinds (highest_rank, rank_sum) store
score = -key so the descending invariant holds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import EmptyInputError, InconsistentUniverseError, LengthMismatchError

EARLY_KINDS = ("sum", "average", "maximum")
LATE_IMAGE_KINDS = ("max_sim", "weighted_sim", "count", "highest_rank", "rank_sum")
LATE_SET_KINDS = (
    "set_max",
    "set_average",
    "set_weighted_average",
    "set_average_max",
    "set_weighted_average_max",
)
LATE_KINDS = LATE_IMAGE_KINDS + LATE_SET_KINDS

DEFAULT_LIST_DEPTH = 100


@dataclass(frozen=True)
class ResultEntry:
    object_id: str
    score: float


def rank_entries(scores: Mapping[str, float], k: int | None = None) -> list[ResultEntry]:
    """Apply the ResultList ordering rule and truncate to k."""
    ordered = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    if k is not None:
        ordered = ordered[: max(k, 0)]
    return [ResultEntry(object_id=oid, score=float(s)) for oid, s in ordered]


def early_fuse(hists: Sequence[np.ndarray], kind: str) -> np.ndarray:
    """Bin-wise sum / mean / max of M histograms."""
    if kind not in EARLY_KINDS:
        raise ValueError(f"unknown early fusion kind {kind!r}; expected one of {EARLY_KINDS}")
    mats = [np.asarray(h) for h in hists]
    if not mats:
        raise EmptyInputError("early_fuse needs at least one histogram")
    length = mats[0].shape[0] if mats[0].ndim == 1 else -1
    for h in mats:
        if h.ndim != 1 or h.shape[0] != length:
            raise LengthMismatchError("early_fuse histograms must be 1-D with equal lengths")
    stack = np.stack(mats)
    if kind == "sum":
        return stack.sum(axis=0)
    if kind == "average":
        return stack.mean(axis=0)
    return stack.max(axis=0)


def _check_score_matrix(scores) -> np.ndarray:
    sm = np.ascontiguousarray(scores, dtype=np.float64)
    if sm.ndim != 2 or sm.shape[0] < 1 or sm.shape[1] < 1:
        raise ValueError(f"score matrix must be 2-D and non-empty, got shape {sm.shape}")
    if not np.isfinite(sm).all():
        raise ValueError("score matrix entries must be finite")
    if (sm < 0.0).any():
        raise ValueError("score matrix entries must be >= 0")
    return sm


def set_similarity(scores, kind: str) -> float:
    """Reduce an M x N score matrix to one object-level similarity."""
    if kind not in LATE_SET_KINDS:
        raise ValueError(f"unknown set fusion kind {kind!r}; expected one of {LATE_SET_KINDS}")
    sm = _check_score_matrix(scores)
    if kind == "set_max":
        return float(sm.max())
    if kind == "set_average":
        return float(sm.mean())
    if kind == "set_weighted_average":
        total = sm.sum()
        return float((sm * sm).sum() / total) if total > 0.0 else 0.0
    row_max = sm.max(axis=1)
    if kind == "set_average_max":
        return float(row_max.mean())
    total = row_max.sum()
    return float((row_max * row_max).sum() / total) if total > 0.0 else 0.0


def _ranked_ids(scores: Mapping[str, float]) -> list[str]:
    """Ids of one list ordered best-first (descending score, ties by id)."""
    return [oid for oid, _ in sorted(scores.items(), key=lambda item: (-item[1], item[0]))]


def _check_universe(lists: Sequence[Mapping[str, float]]) -> list[str]:
    if not lists:
        raise EmptyInputError("fuse_image_rankings needs at least one score list")
    universe = set(lists[0])
    if not universe:
        raise EmptyInputError("score lists must be non-empty")
    for other in lists[1:]:
        if set(other) != universe:
            raise InconsistentUniverseError("score lists cover different image universes")
    return sorted(universe)


def fuse_image_rankings(
    per_query_scores: Sequence[Mapping[str, float]],
    kind: str,
    k: int,
    list_depth: int = DEFAULT_LIST_DEPTH,
) -> list[ResultEntry]:
    """Fuse M per-query-image score lists into one ResultList.

    max_sim: score(d) = max_j S_jd.
    weighted_sim: score(d) = sum_j S_jd^2 / sum_j S_jd (0 when the sum is 0).
    count: score(d) = number of top-L lists containing d, plus the
        bounded tie-break max_j S_jd / (1 + max_j S_jd) so that equal
        counts order by best similarity; this keeps the M=1 case
        identical to plain similarity ranking. Integer part = the count.
    highest_rank: key(d) = min_j rank_j(d); rank_sum: key(d) = sum of
        ranks. Both store score = -key.
    """
    if kind not in LATE_IMAGE_KINDS:
        raise ValueError(
            f"unknown image-level fusion kind {kind!r}; expected one of {LATE_IMAGE_KINDS}"
        )
    ids = _check_universe(per_query_scores)

    if kind in ("max_sim", "weighted_sim"):
        table = np.array([[lst[d] for lst in per_query_scores] for d in ids])
        if kind == "max_sim":
            fused = table.max(axis=1)
        else:
            totals = table.sum(axis=1)
            sq = (table * table).sum(axis=1)
            fused = np.divide(sq, totals, out=np.zeros_like(totals), where=totals > 0.0)
        return rank_entries(dict(zip(ids, fused)), k)

    if kind == "count":
        if list_depth < 1:
            raise ValueError("list_depth must be >= 1")
        counts = {d: 0 for d in ids}
        best = {d: 0.0 for d in ids}
        for lst in per_query_scores:
            for d in _ranked_ids(lst)[:list_depth]:
                counts[d] += 1
            for d in ids:
                best[d] = max(best[d], float(lst[d]))
        fused = {d: counts[d] + best[d] / (1.0 + best[d]) for d in ids}
        return rank_entries(fused, k)

    # rank-keyed kinds
    keys = {d: [] for d in ids}
    for lst in per_query_scores:
        for rank, d in enumerate(_ranked_ids(lst), start=1):
            keys[d].append(rank)
    if kind == "highest_rank":
        fused = {d: -float(min(r)) for d, r in keys.items()}
    else:
        fused = {d: -float(sum(r)) for d, r in keys.items()}
    return rank_entries(fused, k)
