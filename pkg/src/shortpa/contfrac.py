"""Odd-length continued fractions and their convex chains of convergents.

Coordinates are (y1, y2) = (horizontal, vertical) = (q, p) throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterator, NamedTuple


class Point(NamedTuple):
    y1: int
    y2: int


@dataclass(frozen=True)
class ContinuedFraction:
    """[a0; b0, a1, b1, ..., b_{k-1}, a_k]."""

    a: tuple[int, ...]
    b: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(t) for t in self.a))
        object.__setattr__(self, "b", tuple(int(t) for t in self.b))
        if len(self.a) != len(self.b) + 1:
            raise ValueError("need exactly one more a-term than b-terms")
        if any(t < 1 for t in self.a + self.b):
            raise ValueError("all terms must be >= 1")

    @property
    def k(self) -> int:
        return len(self.b)

    def terms(self) -> list[int]:
        out = []
        for i, a in enumerate(self.a):
            out.append(a)
            if i < len(self.b):
                out.append(self.b[i])
        return out

    @classmethod
    def from_terms(cls, terms) -> "ContinuedFraction":
        terms = list(terms)
        if len(terms) % 2 == 0:
            raise ValueError("odd number of terms required")
        return cls(tuple(terms[0::2]), tuple(terms[1::2]))

    def __str__(self) -> str:
        t = self.terms()
        if len(t) == 1:
            return f"[{t[0]}]"
        return f"[{t[0]}; " + ", ".join(map(str, t[1:])) + "]"


@dataclass(frozen=True)
class ConvergentChains:
    C: tuple[Point, ...]
    D: tuple[Point, ...]
    cf: ContinuedFraction = field(repr=False)

    @property
    def p(self) -> int:
        return self.C[-1].y2

    @property
    def q(self) -> int:
        return self.C[-1].y1


def convergents(cf: ContinuedFraction) -> ConvergentChains:
    C = [Point(1, 0)]
    D = [Point(0, 1)]
    for i, a in enumerate(cf.a):
        c, d = C[-1], D[-1]
        C.append(Point(c.y1 + a * d.y1, c.y2 + a * d.y2))
        if i < cf.k:
            b = cf.b[i]
            c = C[-1]
            D.append(Point(d.y1 + b * c.y1, d.y2 + b * c.y2))
    return ConvergentChains(tuple(C), tuple(D), cf)


def eval_cfrac(cf: ContinuedFraction) -> Fraction:
    terms = cf.terms()
    val = Fraction(terms[-1])
    for t in reversed(terms[:-1]):
        val = t + 1 / val
    return val


def to_odd_cfrac(alpha) -> ContinuedFraction:
    alpha = Fraction(alpha)
    if alpha <= 1:
        raise ValueError(f"need alpha > 1, got {alpha}")
    num, den = alpha.numerator, alpha.denominator
    terms = []
    while den:
        t, r = divmod(num, den)
        terms.append(t)
        num, den = den, r
    if len(terms) % 2 == 0:
        if terms[-1] > 1:
            terms[-1] -= 1
            terms.append(1)
        else:
            terms.pop()
            terms[-1] += 1
    return ContinuedFraction.from_terms(terms)


def segments(chains: ConvergentChains) -> Iterator[tuple[Point, Point, int]]:
    """(start, step, count): segment i walks C_i + j*D_i for j < a_i."""
    for i, a in enumerate(chains.cf.a):
        yield chains.C[i], chains.D[i], a


def iter_chain_points(chains: ConvergentChains, skip_prefix: int = 0) -> Iterator[Point]:
    if skip_prefix > chains.cf.a[0]:
        raise ValueError("cannot skip past C_1")
    idx = 0
    for start, step, a in segments(chains):
        for j in range(a):
            if idx >= skip_prefix:
                yield Point(start.y1 + j * step.y1, start.y2 + j * step.y2)
            idx += 1
    yield chains.C[-1]


def chain_points(chains: ConvergentChains, skip_prefix: int = 0) -> list[Point]:
    return list(iter_chain_points(chains, skip_prefix))


def chain_residues(chains: ConvergentChains, skip_prefix: int, M: int) -> set[int]:
    """{y2 mod M : y on the chain after the skipped prefix}, without big points."""
    out: set[int] = set()
    idx = 0
    for start, step, a in segments(chains):
        s, d = start.y2 % M, step.y2 % M
        lo = max(0, skip_prefix - idx)
        for j in range(lo, a):
            out.add((s + j * d) % M)
        idx += a
    out.add(chains.C[-1].y2 % M)
    return out


def chain_vertex_set(chains: ConvergentChains) -> tuple[set[Point], set[Point]]:
    """All lattice points of the C-chain and of the D-chain."""
    cset = set(iter_chain_points(chains))
    dset = set()
    D = chains.D
    for i in range(len(D) - 1):
        b = chains.cf.b[i]
        step = chains.C[i + 1]
        for j in range(b + 1):
            dset.add(Point(D[i].y1 + j * step.y1, D[i].y2 + j * step.y2))
    dset.add(D[-1])
    return cset, dset


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _on_segment(p, a, b) -> bool:
    return (
        _cross(a, b, p) == 0
        and min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def _inside_closed_polygon(pt, poly) -> bool:
    n = len(poly)
    for i in range(n):
        if _on_segment(pt, poly[i], poly[(i + 1) % n]):
            return True
    x, y = pt
    inside = False
    for i in range(n):
        (x1, y1), (x2, y2) = poly[i], poly[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            # compare x against the crossing abscissa exactly
            lhs = (x - x1) * (y2 - y1)
            rhs = (x2 - x1) * (y - y1)
            if (y2 > y1 and lhs < rhs) or (y2 < y1 and lhs > rhs):
                inside = not inside
    return inside


def check_chain_properties(chains: ConvergentChains, scan_box=None) -> dict[str, bool]:
    """Check G1..G6 on the chains; G6 by exhaustive scan of scan_box.

    scan_box is ((lo1, hi1), (lo2, hi2)) and defaults to the bounding box of
    the chain, which suffices because the region between the chain and the
    final ray is contained in it.
    """
    C, D, cf = chains.C, chains.D, chains.cf
    rep = {}
    rep["G1"] = all(gcd(*pt) == 1 for pt in C + D)
    rep["G2"] = all(
        gcd(C[i + 1].y1 - C[i].y1, C[i + 1].y2 - C[i].y2) == cf.a[i] for i in range(len(cf.a))
    )
    rep["G3"] = all(
        gcd(D[i + 1].y1 - D[i].y1, D[i + 1].y2 - D[i].y2) == cf.b[i] for i in range(cf.k)
    )

    def strictly_convex(pts) -> bool:
        signs = set()
        for i in range(len(pts) - 2):
            c = _cross(pts[i], pts[i + 1], pts[i + 2])
            if c == 0:
                return False
            signs.add(c > 0)
        return len(signs) <= 1

    rep["G4"] = strictly_convex(C)
    rep["G5"] = strictly_convex(D)

    p, q = chains.p, chains.q
    pts = chain_points(chains)
    under_ray = all(p * y1 - q * y2 >= 0 for y1, y2 in pts)
    if scan_box is None:
        xs = [pt.y1 for pt in pts]
        ys = [pt.y2 for pt in pts]
        scan_box = ((min(0, *xs), max(xs)), (min(0, *ys), max(ys)))
    (lo1, hi1), (lo2, hi2) = scan_box
    poly = [(0, 0)] + [tuple(c) for c in C]
    on_chain = set(map(tuple, pts)) | {(0, 0)}
    clean = True
    for y1 in range(lo1, hi1 + 1):
        for y2 in range(lo2, hi2 + 1):
            if (y1, y2) in on_chain:
                continue
            if p * y1 - q * y2 >= 0 and _inside_closed_polygon((y1, y2), poly):
                clean = False
                break
        if not clean:
            break
    rep["G6"] = under_ray and clean
    return rep
