"""Average-precision evaluation protocol.

AveP here divides by the result-list length N, not by the number of
relevant items:

    AveP = (1/N) * sum_{k=1..N} P(k) * rel(k)

with P(k) the fraction of relevant items in the top k. The conventional
normalization (divide by min(N, relevant count)) is available behind the
`standard` flag for sanity checks only. Relevance is category match.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import EmptyInputError, ListTooShortError, SpecInvalidError
from .fusion import ResultEntry
from .index import IndexStore, QuerySpec, query


@dataclass(frozen=True)
class RelevanceJudgment:
    query_id: str
    category: str

    def relevant(self, category: str) -> bool:
        return category == self.category


@dataclass(frozen=True)
class QueryCase:
    """One evaluation query: M prepared histograms plus its category."""

    query_id: str
    category: str
    hists: np.ndarray


@dataclass
class PrecisionCurve:
    points: list[tuple[int, float]]   # (k, mean AveP at list length k)


def ave_p_from_flags(
    flags: Sequence[bool], n: int, standard: bool = False, total_relevant: int | None = None
) -> float:
    """AveP of a relevance flag sequence covering the top n ranks."""
    if len(flags) < n:
        raise ListTooShortError(f"need {n} ranked items, got {len(flags)}")
    flags = np.asarray(flags[:n], dtype=bool)
    hits = np.cumsum(flags)
    ranks = np.arange(1, n + 1)
    summed = float(((hits / ranks) * flags).sum())
    if standard:
        denom = min(n, total_relevant if total_relevant is not None else int(hits[-1]))
        return summed / denom if denom > 0 else 0.0
    return summed / n


def ave_p(
    results: Sequence[ResultEntry],
    judge: RelevanceJudgment,
    n: int,
    categories: Mapping[str, str],
    standard: bool = False,
) -> float:
    """AveP of a ResultList; `categories` maps object_id to its label."""
    if len(results) < n:
        raise ListTooShortError(f"need {n} results, got {len(results)}")
    flags = [judge.relevant(categories[e.object_id]) for e in results[:n]]
    total = sum(1 for c in categories.values() if judge.relevant(c)) if standard else None
    return ave_p_from_flags(flags, n, standard=standard, total_relevant=total)


def store_categories(store: IndexStore) -> dict[str, str]:
    return {rec.object_id: rec.category for rec in store.records}


def _case_flags(store: IndexStore, case: QueryCase, template: QuerySpec, n: int) -> list[bool]:
    spec = QuerySpec(
        hists=case.hists,
        similarity=template.similarity,
        fusion=template.fusion,
        k=n,
        list_depth=template.list_depth,
    )
    results = query(store, spec)
    cats = store_categories(store)
    judge = RelevanceJudgment(query_id=case.query_id, category=case.category)
    return [judge.relevant(cats[e.object_id]) for e in results]


def mean_ave_p(
    cases: Sequence[QueryCase], store: IndexStore, template: QuerySpec, n: int
) -> float:
    """Arithmetic mean of per-query AveP at list length n."""
    if not cases:
        raise EmptyInputError("mean_ave_p needs at least one query")
    vals = [ave_p_from_flags(_case_flags(store, c, template, n), n) for c in cases]
    return float(np.mean(vals))


def precision_curve(
    cases: Sequence[QueryCase], store: IndexStore, template: QuerySpec, k_max: int
) -> PrecisionCurve:
    """Mean AveP as a function of list length k = 1..k_max."""
    if not cases:
        raise EmptyInputError("precision_curve needs at least one query")
    if k_max < 1:
        raise SpecInvalidError("k_max must be >= 1")
    if k_max > len(store.records):
        raise SpecInvalidError(
            f"k_max {k_max} exceeds store size {len(store.records)}"
        )
    per_case = [_case_flags(store, c, template, k_max) for c in cases]
    points = []
    for k in range(1, k_max + 1):
        vals = [ave_p_from_flags(flags[:k], k) for flags in per_case]
        points.append((k, float(np.mean(vals))))
    return PrecisionCurve(points=points)


def emit_csv(curve: PrecisionCurve, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "avep"])
        for k, v in curve.points:
            writer.writerow([k, f"{v:.6f}"])


def read_csv(path: str | Path) -> PrecisionCurve:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["k", "avep"]:
        raise ValueError(f"{path}: expected header 'k,avep'")
    return PrecisionCurve(points=[(int(k), float(v)) for k, v in rows[1:]])
