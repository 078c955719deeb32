"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the pure-Python
module. Integer arguments that do not fit in int64 always take the pure path.
"""

from __future__ import annotations

import numpy as np

from shortpa import _pykernels

try:
    from shortpa import _ckernels
except ImportError:  # extension not built
    _ckernels = None

INT64_SAFE = 2**62

_active = "cython" if _ckernels is not None else "python"


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _ckernels is not None else [])


def backend() -> str:
    return _active


def use_backend(name: str) -> None:
    global _active
    if name not in available_backends():
        raise ValueError(f"backend {name!r} not available: {available_backends()}")
    _active = name


def _impl(*magnitudes):
    if _active == "cython" and all(abs(m) < INT64_SAFE for m in magnitudes):
        return _ckernels
    return _pykernels


def parallelogram_empty(y1: int, y2: int, p: int, q: int) -> bool:
    impl = _impl(p * y1, q * y2, p * q * max(y2, 1))
    return impl.parallelogram_empty(y1, y2, p, q)


def lattice_free_points(p: int, q: int, g1: int) -> list[tuple[int, int]]:
    return [tuple(t) for t in _impl(p * q * p).lattice_free_points(p, q, g1)]


def lattice_free_points_scan(p: int, q: int, g1: int) -> list[tuple[int, int]]:
    return [tuple(t) for t in _impl(p * q * p).lattice_free_points_scan(p, q, g1)]


def uncovered_mask(mu: int, nu: int, triples) -> bytearray:
    triples = [tuple(t) for t in triples]
    mags = [mu, nu] + [g + h * e + e for g, h, e in triples]
    return _impl(*mags).uncovered_mask(mu, nu, triples)


def all_rhs_feasible(AX, RHS) -> bool:
    if _active == "cython" and AX.dtype == np.int64 and RHS.dtype == np.int64:
        return bool(_ckernels.all_rhs_feasible(AX, np.ascontiguousarray(RHS)))
    return _pykernels.all_rhs_feasible(AX, RHS)


def feasible_columns(AX, RHS) -> np.ndarray:
    if _active == "cython" and AX.dtype == np.int64 and RHS.dtype == np.int64:
        return _ckernels.feasible_columns(AX, np.ascontiguousarray(RHS))
    return _pykernels.feasible_columns(AX, RHS)
