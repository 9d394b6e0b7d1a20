"""Pure-numpy implementations of the matching hot kernels.

Same contracts as the compiled module ``_core``: nearest-centroid
assignment and the five bag-of-words histogram similarity functions.
Either histogram being all-zero yields a score of 0 for every kind.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"

DOT, HI, NHI, NC, MINMAX = 0, 1, 2, 3, 4

# Descriptor-count chunk for the pairwise-distance matrix; bounds peak
# memory at roughly chunk * k * 8 bytes.
_CHUNK = 1024


def quantize_batch(descs: np.ndarray, cents: np.ndarray) -> np.ndarray:
    """Index of the nearest centroid (squared Euclidean) per descriptor.

    Ties resolve to the lowest centroid index.
    """
    d = np.ascontiguousarray(descs, dtype=np.float64)
    c = np.ascontiguousarray(cents, dtype=np.float64)
    out = np.empty(d.shape[0], dtype=np.int64)
    c_sq = np.einsum("ij,ij->i", c, c)
    for start in range(0, d.shape[0], _CHUNK):
        block = d[start : start + _CHUNK]
        dist = np.einsum("ij,ij->i", block, block)[:, None] - 2.0 * (block @ c.T) + c_sq[None, :]
        out[start : start + _CHUNK] = np.argmin(dist, axis=1)
    return out


def _safe_div(num: np.ndarray, denom: np.ndarray) -> np.ndarray:
    """Elementwise num/denom with 0 wherever denom <= 0."""
    denom = np.asarray(denom, dtype=np.float64)
    return np.where(denom > 0.0, num / np.where(denom > 0.0, denom, 1.0), 0.0)


def sim_one_to_many(q: np.ndarray, hists: np.ndarray, kind: int) -> np.ndarray:
    """Similarity of one query histogram against each row of ``hists``."""
    q = np.ascontiguousarray(q, dtype=np.float64)
    h = np.ascontiguousarray(hists, dtype=np.float64)
    if kind == DOT:
        return h @ q
    if kind == NC:
        qn = np.sqrt(q @ q)
        hn = np.sqrt(np.einsum("ij,ij->i", h, h))
        return _safe_div(h @ q, qn * hn)
    if kind == NHI:
        qs = q.sum()
        hs = h.sum(axis=1)
        if qs <= 0.0:
            return np.zeros(h.shape[0])
        scaled = h / np.where(hs > 0.0, hs, 1.0)[:, None]
        out = np.minimum((q / qs)[None, :], scaled).sum(axis=1)
        return np.where(hs > 0.0, out, 0.0)
    mins = np.minimum(q[None, :], h).sum(axis=1)
    if kind == HI:
        return _safe_div(mins, np.minimum(q.sum(), h.sum(axis=1)))
    if kind == MINMAX:
        return _safe_div(mins, np.maximum(q[None, :], h).sum(axis=1))
    raise ValueError(f"unknown similarity kind code {kind}")


def sim_pairs(qs: np.ndarray, ds: np.ndarray, kind: int) -> np.ndarray:
    """Row-wise similarity between paired histogram matrices."""
    q = np.ascontiguousarray(qs, dtype=np.float64)
    d = np.ascontiguousarray(ds, dtype=np.float64)
    if kind == DOT:
        return np.einsum("ij,ij->i", q, d)
    if kind == NC:
        num = np.einsum("ij,ij->i", q, d)
        denom = np.sqrt(np.einsum("ij,ij->i", q, q)) * np.sqrt(np.einsum("ij,ij->i", d, d))
        return _safe_div(num, denom)
    if kind == NHI:
        qsum = q.sum(axis=1)
        dsum = d.sum(axis=1)
        qn = q / np.where(qsum > 0.0, qsum, 1.0)[:, None]
        dn = d / np.where(dsum > 0.0, dsum, 1.0)[:, None]
        out = np.minimum(qn, dn).sum(axis=1)
        return np.where((qsum > 0.0) & (dsum > 0.0), out, 0.0)
    mins = np.minimum(q, d).sum(axis=1)
    if kind == HI:
        return _safe_div(mins, np.minimum(q.sum(axis=1), d.sum(axis=1)))
    if kind == MINMAX:
        return _safe_div(mins, np.maximum(q, d).sum(axis=1))
    raise ValueError(f"unknown similarity kind code {kind}")
