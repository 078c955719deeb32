"""Bilevel max-min and Pareto instances built from an encoding, with brute solvers."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from shortpa.contfrac import chain_points, chain_vertex_set, convergents, to_odd_cfrac
from shortpa.exactmath import ScaleError, ceil_div
from shortpa.geometry import (
    GeometryFormatError,
    HPolytope,
    _polytope_from_lines,
    dumps_polytope,
    facets_of,
    triangle_Q,
    vertices_of,
)

BILEVEL_SCALE = 10**8
W_VARS = ("u1", "u2", "v1", "v2", "t")
H_VARS = ("z",) + W_VARS


def is_weak_convergent_pair(u, v, alpha) -> bool:
    """True when u2/u1 < alpha < v2/v1, v2*u1 - v1*u2 = 1, u on the lower
    chain and v on the upper one."""
    alpha = Fraction(alpha)
    u1, u2 = u
    v1, v2 = v
    if u1 <= 0 or v1 < 0:
        return False
    if not Fraction(u2, u1) < alpha:
        return False
    if v1 > 0 and not alpha < Fraction(v2, v1):
        return False
    if v1 == 0 and v2 <= 0:
        return False
    if v2 * u1 - v1 * u2 != 1:
        return False
    cset, dset = chain_vertex_set(convergents(to_odd_cfrac(alpha)))
    return tuple(u) in cset and tuple(v) in dset


@dataclass(frozen=True)
class QuadForm:
    """x^T H x + c.x + c0 over named variables, exact coefficients."""

    names: tuple[str, ...]
    H: tuple[tuple[Fraction, ...], ...]
    c: tuple[Fraction, ...]
    c0: Fraction

    def __call__(self, values) -> Fraction:
        x = [values[n] for n in self.names]
        quad = sum(self.H[i][j] * x[i] * x[j] for i in range(len(x)) for j in range(len(x)))
        return quad + sum(a * b for a, b in zip(self.c, x)) + self.c0


def _quad_from_terms(names, terms, linear, const) -> QuadForm:
    idx = {n: i for i, n in enumerate(names)}
    n = len(names)
    H = [[Fraction(0)] * n for _ in range(n)]
    for (a, b), coef in terms.items():
        i, j = idx[a], idx[b]
        if i == j:
            H[i][i] += coef
        else:
            H[i][j] += Fraction(coef, 2)
            H[j][i] += Fraction(coef, 2)
    c = [Fraction(0)] * n
    for a, coef in linear.items():
        c[idx[a]] += coef
    return QuadForm(tuple(names), tuple(map(tuple, H)), tuple(c), Fraction(const))


def linear_form(names, coeffs: dict) -> QuadForm:
    return _quad_from_terms(names, {}, coeffs, 0)


@dataclass
class BilevelInstance:
    """max over z in J of min over w in W of h(z, w), w = (u1, u2, v1, v2, t)."""

    J: tuple[int, int]
    W: HPolytope
    h: QuadForm
    K: int
    T: int
    M: int
    meta: dict = field(default_factory=dict)


def _bilevel_h(K: int, M: int) -> QuadForm:
    # K (v2 u1 - v1 u2 - 1) + (u2 - z - t M)^2
    terms = {
        ("u1", "v2"): K,
        ("u2", "v1"): -K,
        ("u2", "u2"): 1,
        ("z", "z"): 1,
        ("t", "t"): M * M,
        ("u2", "z"): -2,
        ("u2", "t"): -2 * M,
        ("z", "t"): 2 * M,
    }
    return _quad_from_terms(H_VARS, terms, {}, -K)


def upper_set(p: int, q: int) -> HPolytope:
    """v2 <= p-1, v1 >= 0, p v1 - q v2 <= 0, and v2 >= 1 to exclude the origin."""
    return HPolytope.from_rows(2, [((0, 1), p - 1), ((-1, 0), 0), ((p, -q), 0), ((0, -1), -1)])


def build_bilevel(enc) -> BilevelInstance:
    p, q, M, g1 = enc.p, enc.q, enc.M, enc.g1
    T = ceil_div(p, M)
    K = (2 * T * M + p) ** 3
    Q = triangle_Q(p, q, g1)
    P = upper_set(p, q)
    rows = [(a + (0, 0, 0), b) for a, b in Q.rows]
    rows += [((0, 0) + a + (0,), b) for a, b in P.rows]
    rows += [((0, 0, 0, 0, 1), T), ((0, 0, 0, 0, -1), 0)]
    W = HPolytope.from_rows(5, rows)
    meta = {"p": p, "q": q, "g1": g1, "shift": enc.shift}
    return BilevelInstance((enc.source.mu, enc.source.nu), W, _bilevel_h(K, M), K, T, M, meta)


def facet_count(P: HPolytope) -> int:
    """Number of facets after removing redundant rows."""
    return len(facets_of(vertices_of(P)))


def _iter_columns_Q(p, q, g1):
    # u1 in [0, q], g1 <= u2 <= floor(p u1 / q); columns start at ceil(g1 q / p)
    for u1 in range(ceil_div(g1 * q, p), q + 1):
        yield (u1, g1, p * u1 // q)


def _iter_columns_P(p, q):
    # v1 >= 0, ceil(p v1 / q) <= v2 <= p - 1, v2 >= 1
    v1 = 0
    while True:
        lo = max(1, ceil_div(p * v1, q))
        if lo > p - 1:
            return
        yield (v1, lo, p - 1)
        v1 += 1


def _columns_Q(p, q, g1):
    return list(_iter_columns_Q(p, q, g1))


def _columns_P(p, q):
    return list(_iter_columns_P(p, q))


def _expand(cols):
    pts = [(a, b) for a, lo, hi in cols for b in range(lo, hi + 1)]
    return np.array(pts, dtype=object).reshape(-1, 2)


def _bounded_count(cols, limit: int) -> int:
    """Points in the columns, stopping early once limit is passed."""
    n = 0
    for _, lo, hi in cols:
        n += hi - lo + 1
        if n > limit:
            break
    return n


def _scan_size(inst: BilevelInstance, limit: int | None = None) -> int:
    """Work of the separable scan: |U| times the V columns for the determinant
    minimum, plus |J| |U| (T+1) for the distance term."""
    p, q, g1 = inst.meta["p"], inst.meta["q"], inst.meta["g1"]
    outer = (inst.J[1] - inst.J[0] + 1) * (inst.T + 1)
    if limit is None:
        nu = sum(hi - lo + 1 for _, lo, hi in _iter_columns_Q(p, q, g1))
        ncol = sum(1 for _ in _iter_columns_P(p, q))
        return nu * ncol + outer * nu
    # every column is nonempty, so the bounded counts stop after limit steps
    nu = _bounded_count(_iter_columns_Q(p, q, g1), limit // outer + 1)
    ncol = _bounded_count(((0, 0, 0) for _ in _iter_columns_P(p, q)), limit // max(nu, 1) + 1)
    return nu * ncol + outer * nu


def _pieces(inst: BilevelInstance, max_scale: int):
    size = _scan_size(inst, max_scale)
    if size > max_scale:
        raise ScaleError(f"scan of at least {size} points exceeds the limit {max_scale}")
    p, q, g1 = inst.meta["p"], inst.meta["q"], inst.meta["g1"]
    bottoms = [(v1, lo) for v1, lo, _ in _columns_P(p, q)]
    return _expand(_columns_Q(p, q, g1)), np.array(bottoms, dtype=object).reshape(-1, 2)


def _inner_table(inst: BilevelInstance, max_scale: int):
    """Per z in J: min over W of h, as exact ints, plus the minimizing u."""
    U, Vb = _pieces(inst, max_scale)
    lo, hi = inst.J
    K, M = inst.K, inst.M
    # the quadratic term does not involve v, and u1 >= 0 makes u1 v2 - u2 v1
    # smallest at the bottom of each v1 column
    step = max(1, 200_000 // max(len(Vb), 1))
    parts = []
    for start in range(0, len(U), step):
        Ub = U[start : start + step]
        det = np.outer(Ub[:, 0], Vb[:, 1]) - np.outer(Ub[:, 1], Vb[:, 0])
        parts.append(det.min(axis=1) - 1)
    dmin = np.concatenate(parts) if parts else np.zeros(0, dtype=object)
    ts = np.arange(inst.T + 1, dtype=object)
    out = []
    for z in range(lo, hi + 1):
        gap = (U[:, 1][:, None] - z - ts[None, :] * M) ** 2
        vals = K * dmin + gap.min(axis=1)
        k = int(np.argmin(vals))
        out.append((z, int(vals[k]), tuple(U[k]), int(dmin[k]) + 1))
    return out


def solve_bilevel_brute(inst: BilevelInstance, max_scale: int = BILEVEL_SCALE) -> int:
    return max(v for _, v, _, _ in _inner_table(inst, max_scale))


def inner_minimizers(inst: BilevelInstance, max_scale: int = BILEVEL_SCALE):
    """(z, min h, a minimizing u, its determinant) for each z."""
    return _inner_table(inst, max_scale)


def bilevel_semantic_value(enc) -> int:
    """max over z of min over chain points u and t in [0, T] of (u2 - z - tM)^2,
    computed from the continued fraction alone."""
    ch = convergents(enc.cfrac)
    u2s = sorted({pt.y2 for pt in chain_points(ch, skip_prefix=enc.g1)})
    T = ceil_div(enc.p, enc.M)
    M = enc.M

    def dist2(d):
        # nearest t in [0, T] to d / M
        t0 = min(max(d // M, 0), T)
        return min((d - t * M) ** 2 for t in {t0, min(t0 + 1, T)})

    best = 0
    for z in range(enc.source.mu, enc.source.nu + 1):
        best = max(best, min(dist2(u - z) for u in u2s))
    return best


@dataclass
class ParetoInstance:
    """Pareto minima of (f1, f2, f3) over Q6 = J x W, objective g(y) = -y3."""

    Q6: HPolytope
    f1: QuadForm
    f2: QuadForm
    f3: QuadForm
    g: tuple[Fraction, Fraction, Fraction]
    bilevel: BilevelInstance


def build_pareto(enc, parity_trick: bool = False) -> ParetoInstance:
    """The parity trick lives in the source reduction; the flag is recorded so
    callers can assert the value lies in {0, 1}."""
    bl = build_bilevel(enc)
    bl.meta["parity_trick"] = int(parity_trick)
    lo, hi = bl.J
    rows = [((0,) + a, b) for a, b in bl.W.rows]
    rows += [((1, 0, 0, 0, 0, 0), hi), ((-1, 0, 0, 0, 0, 0), -lo)]
    Q6 = HPolytope.from_rows(6, rows)
    return ParetoInstance(
        Q6,
        linear_form(H_VARS, {"z": 1}),
        linear_form(H_VARS, {"z": -1}),
        bl.h,
        (Fraction(0), Fraction(0), Fraction(-1)),
        bl,
    )


def nondominated(Y: np.ndarray) -> np.ndarray:
    """Rows of Y not dominated by another row (<= everywhere, != somewhere)."""
    # a row is dominated by the row sharing its leading coordinates with the
    # smallest last coordinate, so only those survive to the pairwise test
    best = {}
    for row in map(tuple, Y.tolist()):
        key = row[:-1]
        if key not in best or row[-1] < best[key]:
            best[key] = row[-1]
    rows = sorted(k + (v,) for k, v in best.items())
    Y = np.array(rows, dtype=Y.dtype).reshape(-1, Y.shape[1])
    keep = np.ones(len(Y), dtype=bool)
    for i in range(len(Y)):
        le = (Y <= Y[i]).all(axis=1)
        le[i] = False
        if le.any():
            keep[i] = False
    return Y[keep]


def _full_size(inst: BilevelInstance, limit: int) -> int:
    p, q, g1 = inst.meta["p"], inst.meta["q"], inst.meta["g1"]
    outer = (inst.J[1] - inst.J[0] + 1) * (inst.T + 1)
    nu = _bounded_count(_iter_columns_Q(p, q, g1), limit // outer + 1)
    nv = _bounded_count(_iter_columns_P(p, q), limit // max(outer * nu, 1) + 1)
    return outer * nu * nv


def solve_pareto_brute(inst: ParetoInstance, max_scale: int = BILEVEL_SCALE, chunk: int = 200_000):
    """Enumerate every outcome vector on Q6, keep Pareto minima, minimize g."""
    bl = inst.bilevel
    size = _full_size(bl, max_scale)
    if size > max_scale:
        raise ScaleError(f"scan of at least {size} points exceeds the limit {max_scale}")
    p, q, g1 = bl.meta["p"], bl.meta["q"], bl.meta["g1"]
    U = _expand(_columns_Q(p, q, g1))
    V = _expand(_columns_P(p, q))
    lo, hi = bl.J
    K, M = bl.K, bl.M
    step = max(1, chunk // max(len(V), 1))
    outcomes = set()
    for start in range(0, len(U), step):
        Ub = U[start : start + step]
        det = (np.outer(Ub[:, 0], V[:, 1]) - np.outer(Ub[:, 1], V[:, 0]) - 1).ravel()
        u2 = np.repeat(Ub[:, 1], len(V))
        for z in range(lo, hi + 1):
            for t in range(bl.T + 1):
                hv = K * det + (u2 - z - t * M) ** 2
                outcomes.update((z, -z, int(h)) for h in set(hv.tolist()))
    rows = sorted(outcomes)
    big = max(abs(x) for r in rows for x in r)
    Y = np.array(rows, dtype=np.int64 if big < 2**62 else object)
    front = nondominated(Y)
    gv = [sum(c * y for c, y in zip(inst.g, row)) for row in front]
    best = min(gv)
    return (best, sorted(tuple(int(x) for x in row) for row in front))


# text format


def _fmt(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def dumps_quad(name: str, f: QuadForm) -> list[str]:
    out = [f"QUAD {name} " + " ".join(f.names)]
    out += [" ".join(map(_fmt, row)) for row in f.H]
    out.append(" ".join(map(_fmt, f.c)))
    out.append(_fmt(f.c0))
    return out


def _loads_quad(lines, pos):
    head = lines[pos].split()
    names = tuple(head[2:])
    n = len(names)
    try:
        H = tuple(tuple(Fraction(t) for t in lines[pos + 1 + i].split()) for i in range(n))
        c = tuple(Fraction(t) for t in lines[pos + 1 + n].split())
        c0 = Fraction(lines[pos + 2 + n])
    except (ValueError, IndexError, ZeroDivisionError):
        raise GeometryFormatError(f"malformed QUAD block {head[1]!r}") from None
    if any(len(r) != n for r in H) or len(c) != n:
        raise GeometryFormatError(f"QUAD block {head[1]!r} has wrong shape")
    return head[1], QuadForm(names, H, c, c0), pos + 3 + n


def dumps_bilevel(inst: BilevelInstance) -> str:
    out = ["BILEVEL", f"J {inst.J[0]} {inst.J[1]}", f"CONST K {inst.K}", f"CONST T {inst.T}"]
    out.append(f"CONST M {inst.M}")
    out += [f"META {k} {inst.meta[k]}" for k in sorted(inst.meta)]
    out.append("W")
    out += dumps_polytope(inst.W).splitlines()
    out += dumps_quad("h", inst.h)
    return "\n".join(out) + "\n"


def _lines(text):
    return [l.split("#", 1)[0].strip() for l in text.splitlines() if l.split("#", 1)[0].strip()]


def loads_bilevel(text: str) -> BilevelInstance:
    lines = _lines(text)
    if not lines or lines[0] != "BILEVEL":
        raise GeometryFormatError("missing BILEVEL header")
    consts, meta, J = {}, {}, None
    pos = 1
    while pos < len(lines) and lines[pos] != "W":
        toks = lines[pos].split()
        try:
            if toks[0] == "J":
                J = (int(toks[1]), int(toks[2]))
            elif toks[0] == "CONST":
                consts[toks[1]] = int(toks[2])
            elif toks[0] == "META":
                meta[toks[1]] = int(toks[2])
            else:
                raise GeometryFormatError(f"unknown record {lines[pos]!r}")
        except (ValueError, IndexError):
            raise GeometryFormatError(f"malformed record {lines[pos]!r}") from None
        pos += 1
    if J is None or set(consts) != {"K", "T", "M"}:
        raise GeometryFormatError("need J and CONST K, T, M records")
    pos += 1
    end = next((i for i in range(pos, len(lines)) if lines[i].startswith("QUAD")), None)
    if end is None:
        raise GeometryFormatError("missing QUAD h block")
    W = _polytope_from_lines(lines[pos:end])
    _, h, _ = _loads_quad(lines, end)
    return BilevelInstance(J, W, h, consts["K"], consts["T"], consts["M"], meta)


def dumps_pareto(inst: ParetoInstance) -> str:
    out = ["PARETO", "Q6"] + dumps_polytope(inst.Q6).splitlines()
    for name, f in (("f1", inst.f1), ("f2", inst.f2), ("f3", inst.f3)):
        out += dumps_quad(name, f)
    out.append("G " + " ".join(map(_fmt, inst.g)))
    out.append("BILEVEL-SOURCE")
    out += dumps_bilevel(inst.bilevel).splitlines()
    return "\n".join(out) + "\n"


def loads_pareto(text: str) -> ParetoInstance:
    lines = _lines(text)
    if len(lines) < 2 or lines[0] != "PARETO" or lines[1] != "Q6":
        raise GeometryFormatError("missing PARETO/Q6 header")
    end = next((i for i in range(2, len(lines)) if lines[i].startswith("QUAD")), None)
    if end is None:
        raise GeometryFormatError("missing QUAD blocks")
    Q6 = _polytope_from_lines(lines[2:end])
    pos = end
    forms = {}
    for _ in range(3):
        name, f, pos = _loads_quad(lines, pos)
        forms[name] = f
    toks = lines[pos].split()
    if toks[0] != "G" or len(toks) != 4:
        raise GeometryFormatError("expected G record with 3 coefficients")
    g = tuple(Fraction(t) for t in toks[1:])
    if lines[pos + 1] != "BILEVEL-SOURCE":
        raise GeometryFormatError("expected BILEVEL-SOURCE section")
    bl = loads_bilevel("\n".join(lines[pos + 2 :]))
    return ParetoInstance(Q6, forms["f1"], forms["f2"], forms["f3"], g, bl)
