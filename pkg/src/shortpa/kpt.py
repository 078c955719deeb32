"""Fibonacci family of parametric integer programs whose infeasible parameters
form a long midpoint-free convex chain, and the parameter-flattening maps."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from itertools import product as iproduct
from math import lcm

from shortpa import kernels
from shortpa.contfrac import ContinuedFraction, chain_points, convergents, eval_cfrac
from shortpa.exactmath import ScaleError
from shortpa.geometry import (
    GeometryFormatError,
    HPolytope,
    _polytope_from_lines,
    dumps_polytope,
    lattice_points,
    triangle_Q,
)

KPT_MAX_S = 8


@dataclass(frozen=True)
class PipInstance:
    """A x <= F y + f0 for parameters y in the domain.

    domain is either a tuple of inclusive integer intervals or an HPolytope.
    """

    A: tuple[tuple[int, ...], ...]
    F: tuple[tuple[Fraction, ...], ...]
    f0: tuple[Fraction, ...]
    domain: object

    @property
    def m(self) -> int:
        return len(self.A)

    @property
    def n(self) -> int:
        return len(self.A[0]) if self.A else 0

    @property
    def k(self) -> int:
        return len(self.F[0]) if self.F else 0

    def rhs(self, y) -> tuple[Fraction, ...]:
        return tuple(sum(f * v for f, v in zip(row, y)) + c for row, c in zip(self.F, self.f0))

    def satisfied(self, x, y) -> bool:
        return all(
            sum(a * v for a, v in zip(row, x)) <= b for row, b in zip(self.A, self.rhs(y))
        )

    def parameters(self):
        if isinstance(self.domain, HPolytope):
            return lattice_points(self.domain)
        return list(iproduct(*(range(lo, hi + 1) for lo, hi in self.domain)))


def solutions(inst: PipInstance, y, x_box) -> list[tuple[int, ...]]:
    """Integer x in the box with A x <= F y + f0, by exhaustive scan."""
    b = inst.rhs(y)
    out = []
    for x in iproduct(*(range(lo, hi + 1) for lo, hi in x_box)):
        if all(sum(a * v for a, v in zip(row, x)) <= bb for row, bb in zip(inst.A, b)):
            out.append(x)
    return out


@dataclass(frozen=True)
class KptFamily:
    s: int
    cfrac: ContinuedFraction
    p: int
    q: int
    Q: HPolytope
    pip: PipInstance


def fibonacci_cfrac(s: int) -> ContinuedFraction:
    """[2; 1, ..., 1] with 2s ones."""
    return ContinuedFraction.from_terms([2] + [1] * (2 * s))


def fibonacci_family(s: int) -> KptFamily:
    """PIP in x = (x1, x2) with parameters y in Q:
    p y1 - q y2 >= p x1 - q x2 >= 0,  y2 - 1 >= x2 >= 1."""
    if s < 1:
        raise ValueError("s must be at least 1")
    cf = fibonacci_cfrac(s)
    val = eval_cfrac(cf)
    p, q = val.numerator, val.denominator
    Q = triangle_Q(p, q, 2)
    Fr = Fraction
    A = ((p, -q), (-p, q), (0, 1), (0, -1))
    F = ((Fr(p), Fr(-q)), (Fr(0), Fr(0)), (Fr(0), Fr(1)), (Fr(0), Fr(0)))
    f0 = (Fr(0), Fr(0), Fr(-1), Fr(-1))
    return KptFamily(s, cf, p, q, Q, PipInstance(A, F, f0, Q))


def fibonacci(n: int) -> int:
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def infeasible_set(fam: KptFamily, max_s: int = KPT_MAX_S) -> list[tuple[int, int]]:
    """Parameters in Q for which the system has no integer solution."""
    if fam.s > max_s:
        raise ScaleError(f"s = {fam.s} exceeds the limit {max_s}")
    return [tuple(y) for y in kernels.lattice_free_points(fam.p, fam.q, 2)]


def infeasible_set_scan(fam: KptFamily) -> list[tuple[int, int]]:
    """Slow oracle: for each y, scan x2 in [1, y2-1] and the induced x1 range."""
    p, q = fam.p, fam.q
    out = []
    for y in lattice_points(fam.Q):
        vy = p * y[0] - q * y[1]
        found = False
        for x2 in range(1, y[1]):
            # 0 <= p x1 - q x2 <= vy
            lo = -((-q * x2) // p)
            if p * lo - q * x2 <= vy:
                found = True
                break
        if not found:
            out.append(y)
    return out


def chain_prediction(fam: KptFamily) -> list[tuple[int, int]]:
    return [tuple(pt) for pt in chain_points(convergents(fam.cfrac), skip_prefix=2)]


def midpoint_free(points) -> bool:
    """No point is the coordinatewise average of two distinct others."""
    pts = [tuple(p) for p in points]
    present = set(pts)
    for a, b in combinations(present, 2):
        s = tuple(x + y for x, y in zip(a, b))
        if all(c % 2 == 0 for c in s) and tuple(c // 2 for c in s) in present:
            return False
    return True


def strictly_convex(points) -> bool:
    """Sorted points turn the same way at every interior point, never straight."""
    pts = sorted(tuple(p) for p in points)
    signs = set()
    for o, a, b in zip(pts, pts[1:], pts[2:]):
        cross = (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
        if cross == 0:
            return False
        signs.add(cross > 0)
    return len(signs) <= 1


# parameter transformations


def _scaled_rows(A, F, f0):
    """Clear denominators of F and f0 row by row, scaling A with them."""
    rows = []
    for a, frow, c in zip(A, F, f0):
        den = lcm(*(Fraction(v).denominator for v in tuple(frow) + (c,)))
        rows.append(
            (
                tuple(x * den for x in a),
                tuple(int(Fraction(v) * den) for v in frow),
                int(Fraction(c) * den),
            )
        )
    return rows


def _box_domain(inst: PipInstance):
    if isinstance(inst.domain, HPolytope):
        raise ValueError("transformation needs a box parameter domain")
    return inst.domain


def flatten_params(inst: PipInstance) -> PipInstance:
    """Replace a k-dimensional box [0, r_i) of parameters by one parameter
    y' = y1 + y2 r1 + y3 r1 r2 + ..., keeping y as extra variables."""
    box = _box_domain(inst)
    if any(lo != 0 for lo, _ in box):
        raise ValueError("box must start at the origin")
    radii = [hi + 1 for _, hi in box]
    k = len(radii)
    if k == 1:
        return inst
    weights = [1]
    for r in radii[:-1]:
        weights.append(weights[-1] * r)
    A, F, f0 = [], [], []
    for a, frow, c in _scaled_rows(inst.A, inst.F, inst.f0):
        A.append(a + tuple(-v for v in frow))
        F.append((Fraction(0),))
        f0.append(Fraction(c))
    n = inst.n
    for i, r in enumerate(radii):
        e = [0] * k
        e[i] = 1
        A.append((0,) * n + tuple(e))
        F.append((Fraction(0),))
        f0.append(Fraction(r - 1))
        A.append((0,) * n + tuple(-x for x in e))
        F.append((Fraction(0),))
        f0.append(Fraction(0))
    A.append((0,) * n + tuple(weights))
    F.append((Fraction(1),))
    f0.append(Fraction(0))
    A.append((0,) * n + tuple(-w for w in weights))
    F.append((Fraction(-1),))
    f0.append(Fraction(0))
    total = weights[-1] * radii[-1]
    return PipInstance(tuple(A), tuple(F), tuple(f0), ((0, total - 1),))


def flatten_index(y, radii) -> int:
    out, w = 0, 1
    for v, r in zip(y, radii):
        out += v * w
        w *= r
    return out


def unflatten_index(yp: int, radii) -> tuple[int, ...]:
    out = []
    for r in radii:
        out.append(yp % r)
        yp //= r
    return tuple(out)


def add_interval_split(inst: PipInstance, N: int, M: int) -> PipInstance:
    """Parameter y' in [0, MN) with variables y1, y2:
    N y1 + y2 = y', 0 <= y1 < M, 0 <= y2 < N, and the original rows at y2."""
    box = _box_domain(inst)
    if len(box) != 1 or box[0] != (0, N - 1):
        raise ValueError(f"need a 1-parameter instance on [0, {N})")
    n = inst.n
    A, F, f0 = [], [], []
    for a, frow, c in _scaled_rows(inst.A, inst.F, inst.f0):
        A.append(a + (0, -frow[0]))
        F.append((Fraction(0),))
        f0.append(Fraction(c))
    for coeffs, bound in (((1, 0), M - 1), ((-1, 0), 0), ((0, 1), N - 1), ((0, -1), 0)):
        A.append((0,) * n + coeffs)
        F.append((Fraction(0),))
        f0.append(Fraction(bound))
    A.append((0,) * n + (N, 1))
    F.append((Fraction(1),))
    f0.append(Fraction(0))
    A.append((0,) * n + (-N, -1))
    F.append((Fraction(-1),))
    f0.append(Fraction(0))
    return PipInstance(tuple(A), tuple(F), tuple(f0), ((0, M * N - 1),))


# text format


def _fmt(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def dumps_pip(inst: PipInstance) -> str:
    out = [f"PIP {inst.m} {inst.n} {inst.k}", "A"]
    out += [" ".join(map(str, r)) for r in inst.A]
    out.append("F")
    out += [" ".join(map(_fmt, r)) for r in inst.F]
    out.append("f0 " + " ".join(map(_fmt, inst.f0)))
    if isinstance(inst.domain, HPolytope):
        out.append("DOMAIN POLYTOPE")
        out += dumps_polytope(inst.domain).splitlines()
    else:
        out.append("DOMAIN BOX " + " ".join(f"{lo} {hi}" for lo, hi in inst.domain))
    return "\n".join(out) + "\n"


def loads_pip(text: str) -> PipInstance:
    lines = [l.split("#", 1)[0].strip() for l in text.splitlines()]
    lines = [l for l in lines if l]
    try:
        tag, m, n, k = lines[0].split()
        m, n, k = int(m), int(n), int(k)
        if tag != "PIP" or lines[1] != "A" or lines[2 + m] != "F":
            raise ValueError
        A = tuple(tuple(int(t) for t in lines[2 + i].split()) for i in range(m))
        F = tuple(tuple(Fraction(t) for t in lines[3 + m + i].split()) for i in range(m))
        f0_toks = lines[3 + 2 * m].split()
        if f0_toks[0] != "f0":
            raise ValueError
        f0 = tuple(Fraction(t) for t in f0_toks[1:])
        dom = lines[4 + 2 * m].split()
    except (ValueError, IndexError, ZeroDivisionError):
        raise GeometryFormatError("malformed PIP instance") from None
    if any(len(r) != n for r in A) or any(len(r) != k for r in F) or len(f0) != m:
        raise GeometryFormatError("PIP blocks have inconsistent shapes")
    if dom[:2] == ["DOMAIN", "BOX"]:
        vals = [int(t) for t in dom[2:]]
        if len(vals) != 2 * k:
            raise GeometryFormatError("DOMAIN BOX needs one interval per parameter")
        domain = tuple((vals[2 * i], vals[2 * i + 1]) for i in range(k))
    elif dom == ["DOMAIN", "POLYTOPE"]:
        domain = _polytope_from_lines(lines[5 + 2 * m :])
    else:
        raise GeometryFormatError("unknown DOMAIN record")
    return PipInstance(A, F, f0, domain)
