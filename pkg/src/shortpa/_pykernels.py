"""Pure-Python implementations of the hot loops.

Same contracts as the compiled module; selected by shortpa.kernels when the
extension is missing or when the caller asks for it explicitly.
"""

from __future__ import annotations

import numpy as np


def parallelogram_empty(y1: int, y2: int, p: int, q: int) -> bool:
    """No integer x with v.y >= v.x >= 0 and y2-1 >= x2 >= 1, v = (p, -q)."""
    vy = p * y1 - q * y2
    for x2 in range(1, y2):
        # smallest v.x >= 0 on row x2 is (-q*x2) mod p
        if (-q * x2) % p <= vy:
            return False
    return True


def lattice_free_points(p: int, q: int, g1: int) -> list[tuple[int, int]]:
    """Points of {y2 >= g1, y1 <= q, v.y >= 0} with an empty parallelogram.

    Row by row: y is free iff v.y is below the running minimum of
    (-q*x2) mod p over x2 < y2, so each row is an interval of y1.
    """
    out = []
    run_min = None
    for y2 in range(1, p + 1):
        if y2 >= 2:
            r = (-q * (y2 - 1)) % p
            run_min = r if run_min is None else min(run_min, r)
        if y2 < g1:
            continue
        lo = -((-q * y2) // p)  # ceil(q*y2/p)
        if run_min is None:
            hi = q
        else:
            # p*y1 - q*y2 < run_min
            hi = min(q, (q * y2 + run_min - 1) // p)
        for y1 in range(lo, hi + 1):
            out.append((y1, y2))
    return out


def lattice_free_points_scan(p: int, q: int, g1: int) -> list[tuple[int, int]]:
    """Same set as lattice_free_points, testing every triangle point on its own."""
    out = []
    for y2 in range(g1, p + 1):
        for y1 in range(-((-q * y2) // p), q + 1):
            if parallelogram_empty(y1, y2, p, q):
                out.append((y1, y2))
    return out


def uncovered_mask(mu: int, nu: int, triples) -> bytearray:
    """mask[z - mu] == 1 iff z in [mu, nu] lies in no AP(g, h, e)."""
    n = nu - mu + 1
    mask = bytearray(b"\x01") * n
    for g, h, e in triples:
        last = g + h * e
        if last < mu or g > nu:
            continue
        if g < mu:
            j0 = -((g - mu) // e)  # ceil((mu - g)/e)
        else:
            j0 = 0
        start = g + j0 * e
        stop = min(last, nu)
        if start > stop:
            continue
        cnt = (stop - start) // e + 1
        mask[start - mu : stop - mu + 1 : e] = bytes(cnt)
    return mask


def all_rhs_feasible(AX, RHS) -> bool:
    """For every column r of RHS some column c of AX has AX[:, c] <= r."""
    for j in range(RHS.shape[1]):
        r = RHS[:, j]
        if not (AX <= r[:, None]).all(axis=0).any():
            return False
    return True


def feasible_columns(AX, RHS) -> np.ndarray:
    """Boolean per RHS column: whether some AX column fits under it."""
    return np.array(
        [(AX <= RHS[:, j][:, None]).all(axis=0).any() for j in range(RHS.shape[1])],
        dtype=bool,
    )
