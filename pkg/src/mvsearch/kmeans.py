"""Lloyd's k-means with k-means++ seeding.

Deterministic for a fixed seed. Distortion (mean squared distance to the
assigned centroid) is recorded after every assignment step and is
non-increasing; empty clusters are re-seeded to the point currently
farthest from its centroid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import TooFewDescriptorsError

_CHUNK = 2048


@dataclass(frozen=True)
class KMeansConfig:
    seed: int = 0
    tol: float = 1e-4        # relative distortion improvement to stop
    max_iters: int = 100


@dataclass
class KMeansResult:
    centroids: np.ndarray            # (k, d) float64
    labels: np.ndarray               # (n,) int64
    iterations: int
    distortion: float
    history: list[float] = field(default_factory=list)  # distortion per iteration


def _sq_dists_to_nearest(data: np.ndarray, cents: np.ndarray):
    """(labels, squared distance to the nearest centroid) per point."""
    n = data.shape[0]
    labels = np.empty(n, dtype=np.int64)
    best = np.empty(n)
    c_sq = np.einsum("ij,ij->i", cents, cents)
    for start in range(0, n, _CHUNK):
        block = data[start : start + _CHUNK]
        d2 = np.einsum("ij,ij->i", block, block)[:, None] - 2.0 * (block @ cents.T) + c_sq[None, :]
        np.maximum(d2, 0.0, out=d2)
        idx = np.argmin(d2, axis=1)
        labels[start : start + _CHUNK] = idx
        best[start : start + _CHUNK] = d2[np.arange(block.shape[0]), idx]
    return labels, best


def _seed_plus_plus(data: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = data.shape[0]
    chosen = np.empty(k, dtype=np.int64)
    chosen[0] = rng.integers(n)
    d2 = np.einsum("ij,ij->i", data - data[chosen[0]], data - data[chosen[0]])
    for i in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            # remaining mass is on already-chosen points; pick any unchosen
            mask = np.ones(n, dtype=bool)
            mask[chosen[:i]] = False
            candidates = np.nonzero(mask)[0]
            chosen[i] = candidates[rng.integers(len(candidates))]
        else:
            chosen[i] = rng.choice(n, p=d2 / total)
        new_d2 = np.einsum("ij,ij->i", data - data[chosen[i]], data - data[chosen[i]])
        np.minimum(d2, new_d2, out=d2)
    return data[chosen].copy()


def kmeans(data: np.ndarray, k: int, cfg: KMeansConfig = KMeansConfig()) -> KMeansResult:
    data = np.ascontiguousarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError(f"data must be 2-D, got shape {data.shape}")
    n = data.shape[0]
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < k:
        raise TooFewDescriptorsError(f"{n} points for k={k}")
    distinct = np.unique(data, axis=0).shape[0]
    if distinct < k:
        raise TooFewDescriptorsError(f"only {distinct} distinct points for k={k}")

    rng = np.random.default_rng(cfg.seed)
    cents = _seed_plus_plus(data, k, rng)

    history: list[float] = []
    labels = np.zeros(n, dtype=np.int64)
    prev = np.inf
    iterations = 0
    for _ in range(cfg.max_iters):
        labels, best = _sq_dists_to_nearest(data, cents)
        distortion = float(best.mean())
        history.append(distortion)
        iterations += 1
        if distortion <= 0.0 or (np.isfinite(prev) and prev - distortion < cfg.tol * prev):
            break
        prev = distortion

        counts = np.bincount(labels, minlength=k)
        sums = np.zeros_like(cents)
        np.add.at(sums, labels, data)
        nonempty = counts > 0
        cents[nonempty] = sums[nonempty] / counts[nonempty, None]
        for c in np.nonzero(~nonempty)[0]:
            far = int(np.argmax(best))
            cents[c] = data[far]
            best[far] = 0.0

    return KMeansResult(
        centroids=cents,
        labels=labels,
        iterations=iterations,
        distortion=history[-1],
        history=history,
    )
