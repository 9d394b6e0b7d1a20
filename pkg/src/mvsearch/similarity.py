"""Histogram similarity functions.

Five kinds over non-negative histograms q, d of equal length:

  dot     Σ q_i d_i
  hi      Σ min(q_i, d_i) / min(Σq, Σd)          (L1 norms)
  nhi     Σ min(q_i/Σq, d_i/Σd)
  nc      Σ q_i d_i / (||q||_2 ||d||_2)
  minmax  Σ min(q_i, d_i) / Σ max(q_i, d_i)

If either histogram is all-zero the score is 0 for every kind (this
defines away the 0/0 forms). All arithmetic in double precision. The
heavy lifting lives in the kernels package, which dispatches to the
compiled extension or the numpy fallback.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .errors import LengthMismatchError

KINDS = ("dot", "hi", "nhi", "nc", "minmax")


def _as_hist(a, name: str) -> np.ndarray:
    arr = np.ascontiguousarray(a, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    return arr


def check_kind(kind: str) -> str:
    if kind not in KINDS:
        raise ValueError(f"unknown similarity kind {kind!r}; expected one of {KINDS}")
    return kind


def similarity(q, d, kind: str) -> float:
    """Score a single histogram pair."""
    check_kind(kind)
    qa = _as_hist(q, "q")
    da = _as_hist(d, "d")
    if qa.shape[0] != da.shape[0]:
        raise LengthMismatchError(f"histogram lengths differ: {qa.shape[0]} vs {da.shape[0]}")
    out = _kernels.sim_one_to_many(qa, da[None, :], kind)
    return float(out[0])


def similarity_to_many(q, hists: np.ndarray, kind: str) -> np.ndarray:
    """Scores of one query histogram against each row of `hists`."""
    check_kind(kind)
    qa = _as_hist(q, "q")
    h = np.ascontiguousarray(hists, dtype=np.float64)
    if h.ndim != 2:
        raise ValueError(f"hists must be 2-D, got shape {h.shape}")
    if h.shape[1] != qa.shape[0]:
        raise LengthMismatchError(f"histogram lengths differ: {qa.shape[0]} vs {h.shape[1]}")
    return _kernels.sim_one_to_many(qa, h, kind)


def similarity_pairs(qs: np.ndarray, ds: np.ndarray, kind: str) -> np.ndarray:
    """Row-wise scores of paired histograms: out[i] = sim(qs[i], ds[i])."""
    check_kind(kind)
    qa = np.ascontiguousarray(qs, dtype=np.float64)
    da = np.ascontiguousarray(ds, dtype=np.float64)
    if qa.ndim != 2 or da.ndim != 2:
        raise ValueError("similarity_pairs expects 2-D arrays")
    if qa.shape != da.shape:
        raise LengthMismatchError(f"paired shapes differ: {qa.shape} vs {da.shape}")
    return _kernels.sim_pairs(qa, da, kind)


def similarity_matrix(qs: np.ndarray, ds: np.ndarray, kind: str) -> np.ndarray:
    """M x N score matrix between query rows and database rows."""
    check_kind(kind)
    qa = np.ascontiguousarray(qs, dtype=np.float64)
    da = np.ascontiguousarray(ds, dtype=np.float64)
    if qa.ndim != 2 or da.ndim != 2:
        raise ValueError("similarity_matrix expects 2-D arrays")
    if qa.shape[1] != da.shape[1]:
        raise LengthMismatchError(f"histogram lengths differ: {qa.shape[1]} vs {da.shape[1]}")
    out = np.empty((qa.shape[0], da.shape[0]))
    for i in range(qa.shape[0]):
        out[i] = _kernels.sim_one_to_many(qa[i], da, kind)
    return out
