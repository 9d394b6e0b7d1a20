# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled matching kernels: nearest-centroid assignment and the five
bag-of-words histogram similarity functions.

Contracts mirror ``_numpy``; this module exists to keep the per-query
matching loop (quantization + similarity scan) off the interpreter.
"""

from libc.math cimport INFINITY, sqrt

import numpy as np

NAME = "compiled"

DOT, HI, NHI, NC, MINMAX = 0, 1, 2, 3, 4


def quantize_batch(descs, cents):
    """Index of the nearest centroid (squared Euclidean) per descriptor.

    Ties resolve to the lowest centroid index.
    """
    cdef const double[:, ::1] d = np.ascontiguousarray(descs, dtype=np.float64)
    cdef const double[:, ::1] c = np.ascontiguousarray(cents, dtype=np.float64)
    cdef Py_ssize_t n = d.shape[0], k = c.shape[0], dim = d.shape[1]
    out = np.empty(n, dtype=np.int64)
    cdef long long[::1] ov = out
    cdef Py_ssize_t i, j, m, best
    cdef double acc, diff, bestd
    with nogil:
        for i in range(n):
            best = 0
            bestd = INFINITY
            for m in range(k):
                acc = 0.0
                for j in range(dim):
                    diff = d[i, j] - c[m, j]
                    acc += diff * diff
                    if acc >= bestd:
                        break
                if acc < bestd:
                    bestd = acc
                    best = m
            ov[i] = best
    return out


cdef double _row_dot(const double[::1] q, const double[:, ::1] h, Py_ssize_t v) noexcept nogil:
    cdef Py_ssize_t j
    cdef double acc = 0.0
    for j in range(q.shape[0]):
        acc += q[j] * h[v, j]
    return acc


def sim_one_to_many(q, hists, int kind):
    """Similarity of one query histogram against each row of ``hists``."""
    cdef const double[::1] qv = np.ascontiguousarray(q, dtype=np.float64)
    cdef const double[:, ::1] hv = np.ascontiguousarray(hists, dtype=np.float64)
    cdef Py_ssize_t nv = hv.shape[0], nb = hv.shape[1]
    if nb != qv.shape[0]:
        raise ValueError("histogram length mismatch")
    out = np.zeros(nv, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t v, j
    cdef double qsum = 0.0, qsq = 0.0, qval, dval
    cdef double smin, smax, ssum, ssq, sdot, denom
    for j in range(nb):
        qsum += qv[j]
        qsq += qv[j] * qv[j]
    with nogil:
        if kind == 0:  # DOT
            for v in range(nv):
                ov[v] = _row_dot(qv, hv, v)
        elif kind == 1:  # HI
            for v in range(nv):
                smin = 0.0
                ssum = 0.0
                for j in range(nb):
                    dval = hv[v, j]
                    ssum += dval
                    if qv[j] < dval:
                        smin += qv[j]
                    else:
                        smin += dval
                denom = qsum if qsum < ssum else ssum
                ov[v] = smin / denom if denom > 0.0 else 0.0
        elif kind == 2:  # NHI
            if qsum > 0.0:
                for v in range(nv):
                    ssum = 0.0
                    for j in range(nb):
                        ssum += hv[v, j]
                    if ssum <= 0.0:
                        ov[v] = 0.0
                        continue
                    smin = 0.0
                    for j in range(nb):
                        qval = qv[j] / qsum
                        dval = hv[v, j] / ssum
                        smin += qval if qval < dval else dval
                    ov[v] = smin
        elif kind == 3:  # NC
            if qsq > 0.0:
                for v in range(nv):
                    sdot = 0.0
                    ssq = 0.0
                    for j in range(nb):
                        dval = hv[v, j]
                        sdot += qv[j] * dval
                        ssq += dval * dval
                    denom = sqrt(qsq) * sqrt(ssq)
                    ov[v] = sdot / denom if denom > 0.0 else 0.0
        elif kind == 4:  # MINMAX
            for v in range(nv):
                smin = 0.0
                smax = 0.0
                for j in range(nb):
                    dval = hv[v, j]
                    if qv[j] < dval:
                        smin += qv[j]
                        smax += dval
                    else:
                        smin += dval
                        smax += qv[j]
                ov[v] = smin / smax if smax > 0.0 else 0.0
        else:
            with gil:
                raise ValueError(f"unknown similarity kind code {kind}")
    return out


def sim_pairs(qs, ds, int kind):
    """Row-wise similarity between paired histogram matrices."""
    cdef const double[:, ::1] q = np.ascontiguousarray(qs, dtype=np.float64)
    cdef const double[:, ::1] d = np.ascontiguousarray(ds, dtype=np.float64)
    if q.shape[0] != d.shape[0] or q.shape[1] != d.shape[1]:
        raise ValueError("paired histogram shape mismatch")
    cdef Py_ssize_t n = q.shape[0], nb = q.shape[1]
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, j
    cdef double smin, smax, qsum, dsum, qsq, dsq, sdot, denom, qval, dval
    with nogil:
        for i in range(n):
            if kind == 0:
                sdot = 0.0
                for j in range(nb):
                    sdot += q[i, j] * d[i, j]
                ov[i] = sdot
            elif kind == 1:
                smin = 0.0
                qsum = 0.0
                dsum = 0.0
                for j in range(nb):
                    qval = q[i, j]
                    dval = d[i, j]
                    qsum += qval
                    dsum += dval
                    smin += qval if qval < dval else dval
                denom = qsum if qsum < dsum else dsum
                ov[i] = smin / denom if denom > 0.0 else 0.0
            elif kind == 2:
                qsum = 0.0
                dsum = 0.0
                for j in range(nb):
                    qsum += q[i, j]
                    dsum += d[i, j]
                if qsum > 0.0 and dsum > 0.0:
                    smin = 0.0
                    for j in range(nb):
                        qval = q[i, j] / qsum
                        dval = d[i, j] / dsum
                        smin += qval if qval < dval else dval
                    ov[i] = smin
            elif kind == 3:
                sdot = 0.0
                qsq = 0.0
                dsq = 0.0
                for j in range(nb):
                    qval = q[i, j]
                    dval = d[i, j]
                    sdot += qval * dval
                    qsq += qval * qval
                    dsq += dval * dval
                denom = sqrt(qsq) * sqrt(dsq)
                ov[i] = sdot / denom if denom > 0.0 else 0.0
            elif kind == 4:
                smin = 0.0
                smax = 0.0
                for j in range(nb):
                    qval = q[i, j]
                    dval = d[i, j]
                    if qval < dval:
                        smin += qval
                        smax += dval
                    else:
                        smin += dval
                        smax += qval
                ov[i] = smin / smax if smax > 0.0 else 0.0
            else:
                with gil:
                    raise ValueError(f"unknown similarity kind code {kind}")
    return out
