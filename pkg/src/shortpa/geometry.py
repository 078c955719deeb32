"""Exact polytopes in small dimension and the two disjunction-to-system compilers.

Conversions between H- and V-representations use the double description
method on integer cones. Subset-enumeration versions (vertices_brute,
facets_brute) are kept as slow independent oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb, gcd, lcm

from shortpa.exactmath import primitive


class GeometryError(ValueError):
    pass


class UnboundedError(GeometryError):
    pass


class DegenerateError(GeometryError):
    def __init__(self, affine_dim: int, dim: int):
        super().__init__(f"hull has affine dimension {affine_dim}, expected {dim}")
        self.affine_dim = affine_dim


def mcmullen_f(d: int, n: int) -> int:
    """Upper bound on facets of a d-polytope with n vertices (and dually)."""
    if d < 1 or n <= d:
        raise ValueError(f"need n >= d + 1 >= 2, got d={d}, n={n}")
    return comb(n - (d + 1) // 2, n - d) + comb(n - d // 2 - 1, n - d)


# exact linear algebra over Fraction


def _rref(rows):
    m = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows) -> int:
    return len(_rref(rows)[1]) if rows else 0


def solve_square(rows, rhs):
    """Unique solution of rows @ x = rhs, or None when singular."""
    n = len(rows)
    red, piv = _rref([list(r) + [b] for r, b in zip(rows, rhs)])
    if piv != list(range(n)):
        return None
    return tuple(red[i][n] for i in range(n))


def nullspace(rows, ncols: int):
    red, piv = _rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, c in enumerate(piv):
            v[c] = -red[i][f]
        basis.append(v)
    return basis


def affine_dim(points) -> int:
    if not points:
        return -1
    base = points[0]
    return rank([[a - b for a, b in zip(p, base)] for p in points[1:]])


def _integral(vec) -> tuple[int, ...]:
    den = lcm(*(Fraction(x).denominator for x in vec))
    return primitive([int(Fraction(x) * den) for x in vec])


# double description


def extreme_rays(constraints, D: int) -> list[tuple[int, ...]]:
    """Extreme rays of the pointed cone {x in R^D : c.x >= 0 for all c}.

    Raises GeometryError when the cone contains a line.
    """
    cons = [tuple(int(a) for a in c) for c in constraints]
    basis = []
    for i, c in enumerate(cons):
        if rank([cons[j] for j in basis] + [c]) > len(basis):
            basis.append(i)
            if len(basis) == D:
                break
    if len(basis) < D:
        raise GeometryError(f"cone has a lineality space of dimension {D - len(basis)}")
    # columns of the inverse of the basis rows generate the simplicial start cone
    rays = []
    for j in range(D):
        e = [0] * D
        e[j] = 1
        sol = solve_square([cons[i] for i in basis], e)
        rays.append(_integral(sol))
    zeros = []
    for j in range(D):
        z = 0
        for jj, i in enumerate(basis):
            if jj != j:
                z |= 1 << i
        zeros.append(z)

    in_basis = set(basis)
    for i, c in enumerate(cons):
        if i in in_basis:
            continue
        vals = [sum(a * b for a, b in zip(c, r)) for r in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        new_rays, new_zeros = [], []
        for k, v in enumerate(vals):
            if v >= 0:
                new_rays.append(rays[k])
                new_zeros.append(zeros[k] | (1 << i) if v == 0 else zeros[k])
        for a in pos:
            for b in neg:
                common = zeros[a] & zeros[b]
                if common.bit_count() < D - 2:
                    continue
                if any(
                    k != a and k != b and (zeros[k] & common) == common for k in range(len(rays))
                ):
                    continue
                va, vb = vals[a], -vals[b]
                r = primitive([vb * x + va * y for x, y in zip(rays[a], rays[b])])
                new_rays.append(r)
                new_zeros.append(common | (1 << i))
        rays, zeros = new_rays, new_zeros
    return sorted(set(rays))


# representations


@dataclass(frozen=True)
class HPolytope:
    """{x : a.x <= b for (a, b) in rows}, integer rows."""

    dim: int
    rows: tuple[tuple[tuple[int, ...], int], ...]

    @classmethod
    def from_rows(cls, dim, rows) -> "HPolytope":
        out = set()
        for a, b in rows:
            if len(a) != dim:
                raise GeometryError(f"row has {len(a)} coefficients, expected {dim}")
            vec = _integral(list(a) + [b])
            if any(vec[:-1]):
                out.add((tuple(vec[:-1]), vec[-1]))
            elif vec[-1] < 0:
                out.add((tuple([0] * dim), -1))
        return cls(dim, tuple(sorted(out)))

    def contains(self, x) -> bool:
        return all(sum(c * v for c, v in zip(a, x)) <= b for a, b in self.rows)

    def __len__(self):
        return len(self.rows)


@dataclass(frozen=True)
class VPolytope:
    dim: int
    vertices: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_points(cls, dim, points) -> "VPolytope":
        """Hull of full-dimensional points, keeping only actual vertices."""
        pts = sorted({tuple(Fraction(x) for x in p) for p in points})
        return vertices_of(facets_of(cls(dim, tuple(pts))))

    def __len__(self):
        return len(self.vertices)


def facets_of(v: VPolytope) -> HPolytope:
    """Irredundant facet system of a full-dimensional V-polytope."""
    pts = list(v.vertices)
    ad = affine_dim(pts)
    if ad != v.dim:
        raise DegenerateError(ad, v.dim)
    cons = []
    for p in pts:
        den = lcm(*(Fraction(x).denominator for x in p))
        # a.p <= b  <=>  (-den*p, den).(a, b) >= 0
        cons.append(tuple(-int(Fraction(x) * den) for x in p) + (den,))
    rows = []
    for r in extreme_rays(cons, v.dim + 1):
        if any(r[:-1]):
            rows.append((tuple(r[:-1]), r[-1]))
    return HPolytope(v.dim, tuple(sorted(rows)))


def vertices_of(h: HPolytope) -> VPolytope:
    """Vertex set of a bounded H-polytope; raises UnboundedError otherwise."""
    d = h.dim
    cons = [tuple(-c for c in a) + (b,) for a, b in h.rows]
    cons.append(tuple([0] * d) + (1,))
    try:
        rays = extreme_rays(cons, d + 1)
    except GeometryError as exc:
        raise UnboundedError(f"polyhedron is unbounded ({exc})") from None
    verts = []
    for r in rays:
        if r[-1] == 0:
            raise UnboundedError(f"polyhedron is unbounded: recession ray {r[:-1]}")
        verts.append(tuple(Fraction(x, r[-1]) for x in r[:-1]))
    return VPolytope(d, tuple(sorted(verts)))


def vertices_brute(h: HPolytope) -> VPolytope:
    """Oracle: solve every dim-subset of rows and keep feasible points."""
    out = set()
    for sub in combinations(h.rows, h.dim):
        sol = solve_square([a for a, _ in sub], [b for _, b in sub])
        if sol is not None and h.contains(sol):
            out.add(sol)
    return VPolytope(h.dim, tuple(sorted(out)))


def facets_brute(v: VPolytope) -> HPolytope:
    """Oracle: every dim-subset of vertices spanning a supporting hyperplane."""
    pts = list(v.vertices)
    ad = affine_dim(pts)
    if ad != v.dim:
        raise DegenerateError(ad, v.dim)
    d = v.dim
    out = set()
    for sub in combinations(pts, d):
        ns = nullspace([list(p) + [-1] for p in sub], d + 1)
        if len(ns) != 1:
            continue
        vec = _integral(ns[0])
        a, b = vec[:-1], vec[-1]
        if not any(a):
            continue
        vals = [sum(x * y for x, y in zip(a, p)) - b for p in pts]
        if all(x <= 0 for x in vals):
            out.add((tuple(a), b))
        elif all(x >= 0 for x in vals):
            out.add((tuple(-x for x in a), -b))
    return HPolytope(d, tuple(sorted(out)))


def _as_vertices(P) -> VPolytope:
    return P if isinstance(P, VPolytope) else vertices_of(P)


def lift_union(P1, P2) -> VPolytope:
    """conv(P1 x {0}, P2 x {1}); integer points with last coordinate 0 or 1
    are exactly the points of P1 or P2 at that height."""
    V1, V2 = _as_vertices(P1), _as_vertices(P2)
    if V1.dim != V2.dim:
        raise GeometryError(f"dimension mismatch: {V1.dim} vs {V2.dim}")
    verts = [p + (Fraction(0),) for p in V1.vertices] + [p + (Fraction(1),) for p in V2.vertices]
    return VPolytope(V1.dim + 1, tuple(sorted(verts)))


def product_interval(v: VPolytope, pos: int, lo, hi) -> VPolytope:
    """Insert a coordinate ranging over [lo, hi] at index pos."""
    vals = [Fraction(lo)] if lo == hi else [Fraction(lo), Fraction(hi)]
    verts = [p[:pos] + (c,) + p[pos:] for p in v.vertices for c in vals]
    return VPolytope(v.dim + 1, tuple(sorted(verts)))


def box(bounds) -> HPolytope:
    d = len(bounds)
    rows = []
    for i, (lo, hi) in enumerate(bounds):
        e = [0] * d
        e[i] = 1
        rows.append((tuple(e), hi))
        rows.append((tuple(-x for x in e), -lo))
    return HPolytope.from_rows(d, rows)


def triangle_Q(p: int, q: int, g1: int) -> HPolytope:
    """Points of the cone v.y >= 0 with y2 >= g1 and y1 <= q, v = (p, -q)."""
    return HPolytope.from_rows(2, [((-p, q), 0), ((0, -1), -g1), ((1, 0), q)])


def lattice_points(h: HPolytope) -> list[tuple[int, ...]]:
    """Integer points of a bounded polytope, in lexicographic order."""
    from itertools import product as iproduct
    from math import ceil, floor

    V = vertices_of(h)
    if not V.vertices:
        return []
    ranges = []
    for i in range(h.dim):
        cs = [p[i] for p in V.vertices]
        ranges.append(range(ceil(min(cs)), floor(max(cs)) + 1))
    return [x for x in iproduct(*ranges) if h.contains(x)]


def parallelogram_lattice_free(y, p: int, q: int) -> bool:
    """No integer x with v.y >= v.x >= 0 and y2 > x2 > 0."""
    from shortpa import kernels

    return kernels.parallelogram_empty(y[0], y[1], p, q)


# GIP instances


@dataclass
class GIPInstance:
    """exists z in R, forall y in Q, exists x: A x + B y + C z <= b."""

    A: tuple[tuple[int, ...], ...]
    B: tuple[tuple[int, ...], ...]
    C: tuple[tuple[int, ...], ...]
    b: tuple[int, ...]
    R: tuple[int, int]
    Q: HPolytope
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.b)
        if not (len(self.A) == len(self.B) == len(self.C) == n):
            raise GeometryError("A, B, C and b must have the same number of rows")
        if self.Q.dim != self.n_y:
            raise GeometryError("Q must live in the y-space")

    @property
    def num_rows(self) -> int:
        return len(self.b)

    @property
    def n_x(self) -> int:
        return len(self.A[0]) if self.A else 0

    @property
    def n_y(self) -> int:
        return len(self.B[0]) if self.B else 0

    @property
    def n_z(self) -> int:
        return len(self.C[0]) if self.C else 0

    @property
    def num_variables(self) -> int:
        return self.n_x + self.n_y + self.n_z

    def __eq__(self, other):
        if not isinstance(other, GIPInstance):
            return NotImplemented
        return (self.A, self.B, self.C, self.b, self.R, self.Q) == (
            other.A,
            other.B,
            other.C,
            other.b,
            other.R,
            other.Q,
        )


def _linear(coeffs: dict, const: int = 0):
    return dict(coeffs), const


def _compile_rows(facets, forms, order):
    """Substitute linear forms for the coordinates of each facet row.

    forms[i] = (dict var -> coef, const) gives coordinate i; returns rows as
    (dense coefficient tuple over order, bound).
    """
    out = []
    for a, b in facets:
        acc = {}
        bound = b
        for ai, (terms, const) in zip(a, forms):
            if ai == 0:
                continue
            for var, c in terms.items():
                acc[var] = acc.get(var, 0) + ai * c
            bound -= ai * const
        out.append((tuple(acc.get(v, 0) for v in order), bound))
    return out


def _split(rows, n_x, n_y):
    A = tuple(r[:n_x] for r, _ in rows)
    B = tuple(r[n_x : n_x + n_y] for r, _ in rows)
    C = tuple(r[n_x + n_y :] for r, _ in rows)
    b = tuple(bd for _, bd in rows)
    return A, B, C, b


def big_bound(M: int, p: int, q: int) -> int:
    return (M + p + q) ** 3


def lifted_disjunct(M: int, S: int, T: int) -> tuple[VPolytope, HPolytope]:
    """Lift of {1 <= t1 <= M-1, |s| <= S} and {|t1| <= T, 0 <= s <= S}."""
    P1 = box([(1, M - 1), (-S, S)])
    P2 = box([(-T, T), (0, S)])
    V = lift_union(P1, P2)
    return V, facets_of(V)


def _encoding_meta(enc, kind):
    src = enc.source
    return {
        "kind": kind,
        "M": enc.M,
        "p": enc.p,
        "q": enc.q,
        "g1": enc.g1,
        "mu": src.mu,
        "nu": src.nu,
    }


def build_system1(enc) -> GIPInstance:
    """Distribute the mod-or-parallelogram disjunction into four two-way
    disjunctions and replace each by a 6-facet lifted polytope with one
    fresh coordinate: 24 rows over x = (x1, x2, u1..u4), y = (y1, y2), z."""
    M, p, q = enc.M, enc.p, enc.q
    N = big_bound(M, p, q)
    S = 2 * N * (p + q)
    T = 2 * N + M * N
    _, lifted = lifted_disjunct(M, S, T)
    order = ("x1", "x2", "u1", "u2", "u3", "u4", "y1", "y2", "z")
    t1 = _linear({"z": 1, "y2": -1, "x1": -M})
    sides = [
        _linear({"y1": p, "y2": -q, "x1": -p, "x2": q}),  # v.y - v.x
        _linear({"x1": p, "x2": -q}),  # v.x
        _linear({"y2": 1, "x2": -1}, -1),  # y2 - 1 - x2
        _linear({"x2": 1}, -1),  # x2 - 1
    ]
    rows = []
    for j, s in enumerate(sides):
        rows += _compile_rows(lifted.rows, [t1, s, _linear({f"u{j + 1}": 1})], order)
    A, B, C, b = _split(rows, 6, 2)
    meta = _encoding_meta(enc, "system1")
    meta.update(N=N, S=S, T=T, lift_facets=len(lifted.rows))
    return GIPInstance(A, B, C, b, (enc.source.mu, enc.source.nu), triangle_Q(p, q, enc.g1), meta)


def mod_polytope(M: int, N: int) -> HPolytope:
    """{(x1, y2, z) : 1 <= z - y2 - M x1 <= M-1, |x1|, |y2|, |z| <= N}."""
    rows = [((M, 1, -1), -1), ((-M, -1, 1), M - 1)]
    return HPolytope.from_rows(3, rows + list(box([(-N, N)] * 3).rows))


def fibre_polytope(p: int, q: int, g1: int) -> HPolytope:
    """{(y1, y2, x1, x2) : y in Q, v.y >= v.x >= 0, y2-1 >= x2 >= 1}."""
    rows = [((a[0], a[1], 0, 0), b) for a, b in triangle_Q(p, q, g1).rows]
    rows += [
        ((-p, q, p, -q), 0),
        ((0, 0, -p, q), 0),
        ((0, -1, 0, 1), -1),
        ((0, 0, 0, -1), -1),
    ]
    return HPolytope.from_rows(4, rows)


def build_system2(enc) -> GIPInstance:
    """Hull of the two branches as polytopes in (z, y1, y2, x1, x2), lifted
    to R^6 and converted to facets: x = (x1, x2, t)."""
    M, p, q = enc.M, enc.p, enc.q
    mu, nu = enc.source.mu, enc.source.nu
    N = big_bound(M, p, q)
    V3 = vertices_of(mod_polytope(M, N))
    # (x1, y2, z) -> (z, y1, y2, x1, x2) with y1 in [-N, N] and x2 = 0
    P1 = VPolytope(
        5,
        tuple(
            sorted(
                (z, Fraction(y1), y2, x1, Fraction(0))
                for x1, y2, z in V3.vertices
                for y1 in (-N, N)
            )
        ),
    )
    V4 = vertices_of(fibre_polytope(p, q, enc.g1))
    P2 = product_interval(V4, 0, mu, nu)
    lift = lift_union(P1, P2)
    H = facets_of(lift)
    # coordinates (z, y1, y2, x1, x2, t) -> columns (x1, x2, t | y1, y2 | z)
    perm = (3, 4, 5, 1, 2, 0)
    rows = [(tuple(a[i] for i in perm), b) for a, b in H.rows]
    A, B, C, b = _split(rows, 3, 2)
    meta = _encoding_meta(enc, "system2")
    meta.update(
        N=N,
        mod_vertices=len(V3),
        P1_vertices=len(P1),
        fibre_vertices=len(V4),
        P2_vertices=len(P2),
        lift_vertices=len(lift),
        facets=len(H),
    )
    return GIPInstance(A, B, C, b, (mu, nu), triangle_Q(p, q, enc.g1), meta)


# text formats


class GeometryFormatError(ValueError):
    pass


def _fmt(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _parse_rat(tok, lineno):
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise GeometryFormatError(f"line {lineno}: bad rational {tok!r}") from None


def dumps_polytope(P) -> str:
    if isinstance(P, HPolytope):
        lines = [f"H {P.dim}"] + [" ".join(map(_fmt, a + (b,))) for a, b in P.rows]
    else:
        lines = [f"V {P.dim}"] + [" ".join(map(_fmt, v)) for v in P.vertices]
    return "\n".join(lines) + "\n"


def _polytope_from_lines(lines, start_lineno=1):
    header = lines[0].split()
    if len(header) != 2 or header[0] not in ("H", "V"):
        raise GeometryFormatError(f"line {start_lineno}: expected 'H d' or 'V d'")
    try:
        d = int(header[1])
    except ValueError:
        raise GeometryFormatError(f"line {start_lineno}: bad dimension") from None
    want = d + 1 if header[0] == "H" else d
    items = []
    for off, line in enumerate(lines[1:], 1):
        toks = line.split()
        if len(toks) != want:
            raise GeometryFormatError(
                f"line {start_lineno + off}: expected {want} values, got {len(toks)}"
            )
        items.append([_parse_rat(t, start_lineno + off) for t in toks])
    if header[0] == "H":
        return HPolytope.from_rows(d, [(r[:-1], r[-1]) for r in items])
    return VPolytope(d, tuple(sorted(tuple(r) for r in items)))


def _content_lines(text):
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line))
    return out


def loads_polytope(text: str):
    lines = _content_lines(text)
    if not lines:
        raise GeometryFormatError("empty polytope")
    return _polytope_from_lines([l for _, l in lines], lines[0][0])


def dumps_gip(inst: GIPInstance) -> str:
    out = [f"GIP {inst.n_x} {inst.n_y} {inst.n_z} {inst.num_rows}"]
    for name, mat in (("A", inst.A), ("B", inst.B), ("C", inst.C)):
        out.append(name)
        out += [" ".join(map(str, r)) for r in mat]
    out.append("b")
    out += [str(x) for x in inst.b]
    out.append(f"R {inst.R[0]} {inst.R[1]}")
    out.append("Q")
    out += dumps_polytope(inst.Q).splitlines()
    for k in sorted(inst.meta):
        out.append(f"META {k} {inst.meta[k]}")
    return "\n".join(out) + "\n"


def loads_gip(text: str) -> GIPInstance:
    lines = _content_lines(text)
    if not lines or lines[0][1].split()[0] != "GIP":
        raise GeometryFormatError("missing GIP header")
    try:
        nx, ny, nz, nrows = (int(t) for t in lines[0][1].split()[1:])
    except ValueError:
        raise GeometryFormatError(f"line {lines[0][0]}: bad GIP header") from None
    pos = 1

    def take_matrix(name, width):
        nonlocal pos
        if pos >= len(lines) or lines[pos][1] != name:
            where = lines[pos][0] if pos < len(lines) else "end"
            raise GeometryFormatError(f"line {where}: expected section {name}")
        pos += 1
        rows = []
        for _ in range(nrows):
            if pos >= len(lines):
                raise GeometryFormatError(f"section {name} is truncated")
            lineno, line = lines[pos]
            toks = line.split()
            if len(toks) != width:
                raise GeometryFormatError(f"line {lineno}: expected {width} values")
            try:
                rows.append(tuple(int(t) for t in toks))
            except ValueError:
                raise GeometryFormatError(f"line {lineno}: expected integers") from None
            pos += 1
        return tuple(rows)

    A = take_matrix("A", nx)
    B = take_matrix("B", ny)
    C = take_matrix("C", nz)
    b = tuple(r[0] for r in take_matrix("b", 1))
    if pos >= len(lines) or lines[pos][1].split()[0] != "R":
        raise GeometryFormatError("expected R record")
    lineno, line = lines[pos]
    try:
        lo, hi = (int(t) for t in line.split()[1:])
    except ValueError:
        raise GeometryFormatError(f"line {lineno}: bad R record") from None
    pos += 1
    if pos >= len(lines) or lines[pos][1] != "Q":
        raise GeometryFormatError("expected Q section")
    pos += 1
    qlines = []
    start = lines[pos][0] if pos < len(lines) else 0
    while pos < len(lines) and not lines[pos][1].startswith("META"):
        qlines.append(lines[pos][1])
        pos += 1
    if not qlines:
        raise GeometryFormatError("empty Q section")
    Q = _polytope_from_lines(qlines, start)
    if not isinstance(Q, HPolytope):
        raise GeometryFormatError("Q must be given as H-rows")
    meta = {}
    for lineno, line in lines[pos:]:
        toks = line.split()
        if len(toks) != 3 or toks[0] != "META":
            raise GeometryFormatError(f"line {lineno}: expected 'META key value'")
        try:
            meta[toks[1]] = int(toks[2])
        except ValueError:
            meta[toks[1]] = toks[2]
    return GIPInstance(A, B, C, b, (lo, hi), Q, meta)
