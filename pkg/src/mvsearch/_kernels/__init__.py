"""Matching-kernel backend selection.

Two interchangeable implementations of the hot kernels exist: a compiled
Cython module (``_core``) and a pure-numpy fallback (``_numpy``). The
compiled one is preferred when importable; ``MVSEARCH_BACKEND=numpy`` (or
``compiled``) forces a choice. :func:`set_backend` switches at runtime,
which the benchmark harness uses to compare the two.
"""

from __future__ import annotations

import os

from . import _numpy

DOT = _numpy.DOT
HI = _numpy.HI
NHI = _numpy.NHI
NC = _numpy.NC
MINMAX = _numpy.MINMAX

KIND_CODES = {"dot": DOT, "hi": HI, "nhi": NHI, "nc": NC, "minmax": MINMAX}

_backends = {"numpy": _numpy}
try:
    from . import _core

    _backends["compiled"] = _core
except ImportError:  # extension not built; numpy fallback only
    _core = None


def available_backends() -> tuple[str, ...]:
    """Names of every importable backend, compiled first when present."""
    return tuple(name for name in ("compiled", "numpy") if name in _backends)


_env = os.environ.get("MVSEARCH_BACKEND", "")
if _env and _env not in _backends:
    raise ImportError(f"MVSEARCH_BACKEND={_env!r} not available; have {sorted(_backends)}")
_active = _backends[_env] if _env else _backends.get("compiled", _numpy)


def set_backend(name: str):
    """Select the active kernel backend; returns the previous name."""
    global _active
    if name not in _backends:
        raise ValueError(f"unknown backend {name!r}; have {sorted(_backends)}")
    previous = _active.NAME
    _active = _backends[name]
    return previous


def active_backend() -> str:
    return _active.NAME


def _code(kind) -> int:
    """Kind name or code -> kernel kind code."""
    if isinstance(kind, str):
        try:
            return KIND_CODES[kind]
        except KeyError:
            raise ValueError(f"unknown similarity kind {kind!r}") from None
    return int(kind)


def quantize_batch(descs, cents):
    return _active.quantize_batch(descs, cents)


def sim_one_to_many(q, hists, kind):
    return _active.sim_one_to_many(q, hists, _code(kind))


def sim_pairs(qs, ds, kind):
    return _active.sim_pairs(qs, ds, _code(kind))
