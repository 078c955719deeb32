# Compiled versions of the hot loops in _pykernels; int64 inputs only.
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()


cdef inline int64_t pmod(int64_t a, int64_t m) nogil:
    cdef int64_t r = a % m
    if r < 0:
        r += m
    return r


cdef bint _par_empty(int64_t y1, int64_t y2, int64_t p, int64_t q) nogil:
    cdef int64_t vy = p * y1 - q * y2
    cdef int64_t x2
    for x2 in range(1, y2):
        if pmod(-q * x2, p) <= vy:
            return False
    return True


def parallelogram_empty(int64_t y1, int64_t y2, int64_t p, int64_t q):
    return bool(_par_empty(y1, y2, p, q))


def lattice_free_points(int64_t p, int64_t q, int64_t g1):
    # row minima of (-q x2) mod p, as in the pure version
    cdef int64_t y1, y2, lo, hi, r
    cdef int64_t run_min = -1
    out = []
    for y2 in range(1, p + 1):
        if y2 >= 2:
            r = pmod(-q * (y2 - 1), p)
            if run_min < 0 or r < run_min:
                run_min = r
        if y2 < g1:
            continue
        lo = (q * y2 + p - 1) // p
        if run_min < 0:
            hi = q
        else:
            hi = (q * y2 + run_min - 1) // p
            if hi > q:
                hi = q
        for y1 in range(lo, hi + 1):
            out.append((y1, y2))
    return out


def lattice_free_points_scan(int64_t p, int64_t q, int64_t g1):
    # every triangle point tested on its own
    cdef int64_t y1, y2, lo
    out = []
    for y2 in range(g1, p + 1):
        lo = (q * y2 + p - 1) // p
        for y1 in range(lo, q + 1):
            if _par_empty(y1, y2, p, q):
                out.append((y1, y2))
    return out


def uncovered_mask(int64_t mu, int64_t nu, triples):
    cdef int64_t n = nu - mu + 1
    cdef int64_t g, h, e, z, last, start, stop
    mask = bytearray(b"\x01") * n
    cdef unsigned char[::1] mv = mask
    for t in triples:
        g, h, e = t[0], t[1], t[2]
        last = g + h * e
        if last < mu or g > nu:
            continue
        if g < mu:
            start = g + ((mu - g + e - 1) // e) * e
        else:
            start = g
        stop = last if last < nu else nu
        z = start
        while z <= stop:
            mv[z - mu] = 0
            z += e
    return mask


cdef bint _fits(const int64_t[:, :] AX, const int64_t[:, :] RHS, Py_ssize_t j) nogil:
    cdef Py_ssize_t rows = AX.shape[0]
    cdef Py_ssize_t cols = AX.shape[1]
    cdef Py_ssize_t c, r
    cdef bint ok
    for c in range(cols):
        ok = True
        for r in range(rows):
            if AX[r, c] > RHS[r, j]:
                ok = False
                break
        if ok:
            return True
    return False


def all_rhs_feasible(const int64_t[:, :] AX, const int64_t[:, :] RHS):
    cdef Py_ssize_t j
    for j in range(RHS.shape[1]):
        if not _fits(AX, RHS, j):
            return False
    return True


def feasible_columns(const int64_t[:, :] AX, const int64_t[:, :] RHS):
    cdef Py_ssize_t j, n = RHS.shape[1]
    out = np.zeros(n, dtype=bool)
    for j in range(n):
        out[j] = _fits(AX, RHS, j)
    return out
