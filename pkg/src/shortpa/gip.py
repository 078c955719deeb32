"""Brute-force decision and counting for exists z forall y exists x systems."""

from __future__ import annotations

from itertools import product as iproduct

import numpy as np

from shortpa import kernels
from shortpa.exactmath import ScaleError
from shortpa.geometry import GIPInstance, lattice_points, vertices_of

GIP_SCALE = 10**8


def system_x_box(inst: GIPInstance, pad: int = 0) -> list[tuple[int, int]]:
    """Witness box for instances built from an encoding.

    The quotient witness x1 = floor((z - y2 - 1)/M) with y2 in [g1, p] and the
    parallelogram witnesses in [0,q] x [1,p-1] both fit; x2 = 0 serves the
    quotient branch. Lift coordinates are 0 or 1.
    """
    m = inst.meta
    M, p, q, g1, mu, nu = (m[k] for k in ("M", "p", "q", "g1", "mu", "nu"))
    x1 = (min(0, (mu - p - 1) // M) - pad, max(q, (nu - g1 - 1) // M) + pad)
    x2 = (-pad, p + pad)
    lifts = [(-pad, 1 + pad)] * (inst.n_x - 2)
    return [x1, x2] + lifts


def _grid(box):
    return np.array(list(iproduct(*(range(lo, hi + 1) for lo, hi in box))), dtype=object)


def _box_count(h) -> int:
    """Lattice points in the bounding box of h, an upper bound on |h cap Z^d|."""
    from math import ceil, floor

    verts = vertices_of(h).vertices
    if not verts:
        return 0
    n = 1
    for i in range(h.dim):
        cs = [v[i] for v in verts]
        n *= max(0, floor(max(cs)) - ceil(min(cs)) + 1)
    return n


def _fits(*mags) -> bool:
    return all(abs(int(m)) < kernels.INT64_SAFE for m in mags)


class _Prepared:
    def __init__(self, inst: GIPInstance, x_box, max_scale):
        self.inst = inst
        zs = range(inst.R[0], inst.R[1] + 1)
        nx = 1
        for lo, hi in x_box:
            nx *= max(0, hi - lo + 1)
        size = len(zs) * max(_box_count(inst.Q), 1) * nx
        if size > max_scale:
            raise ScaleError(f"GIP scan of {size} combinations exceeds the limit {max_scale}")
        ys = lattice_points(inst.Q)
        self.zs = zs
        X = _grid(x_box)
        A = np.array(inst.A, dtype=object).reshape(inst.num_rows, inst.n_x)
        AX = A @ X.T if len(X) else np.zeros((inst.num_rows, 0), dtype=object)
        Y = np.array(ys, dtype=object).reshape(len(ys), inst.n_y)
        B = np.array(inst.B, dtype=object).reshape(inst.num_rows, inst.n_y)
        b = np.array(inst.b, dtype=object)
        self.base = b[:, None] - B @ Y.T  # rows x |Y|
        self.C = np.array(inst.C, dtype=object).reshape(inst.num_rows, inst.n_z)[:, 0]
        zmax = max(abs(inst.R[0]), abs(inst.R[1]))
        mags = [abs(AX).max() if AX.size else 0, abs(self.base).max() if self.base.size else 0]
        mags.append((abs(self.C).max() if self.C.size else 0) * zmax + mags[1])
        self.dtype = np.int64 if _fits(*mags) else object
        self.AX = AX.astype(self.dtype)
        self.base = self.base.astype(self.dtype)
        self.Cv = self.C.astype(self.dtype)
        self.empty_x = AX.shape[1] == 0

    def holds(self, z: int) -> bool:
        if self.base.shape[1] == 0:
            return True
        if self.empty_x:
            return False
        rhs = self.base - self.Cv[:, None] * z
        return kernels.all_rhs_feasible(self.AX, rhs.astype(self.dtype))


def qualifying_z(inst: GIPInstance, x_box=None, max_scale: int = GIP_SCALE) -> list[int]:
    """All z in R with forall y in Q exists x in x_box: Ax + By + Cz <= b."""
    if x_box is None:
        x_box = system_x_box(inst)
    prep = _Prepared(inst, x_box, max_scale)
    return [z for z in prep.zs if prep.holds(z)]


def decide_gip(inst: GIPInstance, x_box=None, max_scale: int = GIP_SCALE) -> bool:
    if x_box is None:
        x_box = system_x_box(inst)
    prep = _Prepared(inst, x_box, max_scale)
    return any(prep.holds(z) for z in prep.zs)


def count_gip(inst: GIPInstance, x_box=None, max_scale: int = GIP_SCALE) -> int:
    return len(qualifying_z(inst, x_box, max_scale))
