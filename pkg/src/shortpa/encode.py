"""Compile AP covers into continued fractions and short Presburger sentences.

A normalized instance with k progressions becomes the fraction
    [g1; b0, h1, b1, 1, b2, h2, ..., 1, b_{2k-2}, h_k]
whose chain, read modulo M, walks exactly through the progressions: the
segment C_{2i-1}C_{2i} has h_i + 1 lattice points with second coordinates
g_i, g_i + e_i, ... mod M, and the connecting segments have no interior
points. Membership of y in the chain is then a lattice-freeness statement
about a parallelogram, which is what the sentences express.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from shortpa.apcover import APCoverInstance, MAPCoverInstance, is_normalized, normalize
from shortpa.contfrac import (
    ContinuedFraction,
    ConvergentChains,
    chain_residues,
    convergents,
    to_odd_cfrac,
)
from shortpa.exactmath import mod_inverse, product
from shortpa.presburger import AND, OR, Formula, ShortSentence, f_and, f_or, le, tree_map_rows


@dataclass(frozen=True)
class Encoding:
    M: int
    cfrac: ContinuedFraction
    chains: ConvergentChains = field(repr=False)
    source: APCoverInstance = field(repr=False)
    shift: int = 0

    @property
    def p(self) -> int:
        return self.chains.p

    @property
    def q(self) -> int:
        return self.chains.q

    @property
    def v(self) -> tuple[int, int]:
        return (self.p, -self.q)

    @property
    def g1(self) -> int:
        return self.cfrac.a[0]

    def residues(self) -> set[int]:
        """Delta = {y2 mod M : y in the chain minus its first g1 points}."""
        return chain_residues(self.chains, self.g1, self.M)


def compute_M(inst: APCoverInstance) -> int:
    M = 1 + inst.nu * product(t.g * t.last for t in inst.triples)
    assert M > inst.nu
    for t in inst.triples:
        assert M > t.last
        assert gcd(M, t.g) == 1 and gcd(M, t.last) == 1
    return M


def _solve(coef: int, target: int, M: int) -> int:
    """Smallest b in [1, M] with coef*b = target (mod M)."""
    b = (mod_inverse(coef % M, M) * target) % M
    return b if b else M


def build_encoding(inst: APCoverInstance, shift: int = 0) -> Encoding:
    if not is_normalized(inst):
        raise ValueError("instance must be normalized (g >= 2, h >= 1, mu >= 1)")
    M = compute_M(inst)
    T = inst.triples
    if not T:
        # Nothing to cover: [M] has the single chain point (1, M) = 0 mod M,
        # and 0 lies outside [mu, nu] because M > nu.
        cf = ContinuedFraction((M,), ())
        return Encoding(M, cf, convergents(cf), inst, shift)

    a = [T[0].g]
    b = []
    # running convergents, exact
    C = (1, T[0].g)
    D = (0, 1)
    for i, t in enumerate(T):
        if i > 0:
            # D_{2i} makes the next chain point land on g_{i+1}
            bb = _solve(C[1], t.g - C[1] - D[1], M)
            b.append(bb)
            D = (D[0] + bb * C[0], D[1] + bb * C[1])
            a.append(1)
            C = (C[0] + D[0], C[1] + D[1])
        # D_{2i+1} = e_{i+1} so the segment steps through the progression
        bb = _solve(C[1], t.e - D[1], M)
        b.append(bb)
        D = (D[0] + bb * C[0], D[1] + bb * C[1])
        a.append(t.h)
        C = (C[0] + t.h * D[0], C[1] + t.h * D[1])
    cf = ContinuedFraction(tuple(a), tuple(b))
    chains = convergents(cf)
    assert chains.C[-1] == C
    return Encoding(M, cf, chains, inst, shift)


def encode_instance(inst: APCoverInstance) -> Encoding:
    norm, shift = normalize(inst)
    return build_encoding(norm, shift)


def check_conditions(enc: Encoding) -> dict[str, bool]:
    """The seven structural conditions linking the fraction to the cover."""
    T = enc.source.triples
    k = len(T)
    M = enc.M
    cf, ch = enc.cfrac, enc.chains
    rep = {}
    rep["1_terms_in_range"] = all(1 <= t <= M for t in cf.a + cf.b)
    if k == 0:
        for key in ("2_even_a_one", "3_odd_a_h", "4_start_g", "5_end_last", "6_segments", "7_joins"):
            rep[key] = True
        rep["delta"] = not (enc.residues() & set(range(enc.source.mu, enc.source.nu + 1)))
        return rep
    ok_shape = len(cf.a) == 2 * k
    rep["2_even_a_one"] = ok_shape and all(cf.a[2 * i] == 1 for i in range(1, k))
    rep["3_odd_a_h"] = ok_shape and all(cf.a[2 * i - 1] == T[i - 1].h for i in range(1, k + 1))
    if not ok_shape:
        for key in ("4_start_g", "5_end_last", "6_segments", "7_joins", "delta"):
            rep[key] = False
        return rep
    C = ch.C
    rep["4_start_g"] = all((C[2 * i - 1].y2 - T[i - 1].g) % M == 0 for i in range(1, k + 1))
    rep["5_end_last"] = all((C[2 * i].y2 - T[i - 1].last) % M == 0 for i in range(1, k + 1))
    seg_ok = True
    for i in range(1, k + 1):
        t = T[i - 1]
        lo, hi = C[2 * i - 1], C[2 * i]
        n = gcd(hi.y1 - lo.y1, hi.y2 - lo.y2)
        if n != t.h:
            seg_ok = False
            break
        sy = (hi.y2 - lo.y2) // n
        got = {(lo.y2 + j * sy) % M for j in range(n + 1)}
        if got != set(t.members()):
            seg_ok = False
            break
    rep["6_segments"] = seg_ok
    rep["7_joins"] = all(
        gcd(C[2 * i + 1].y1 - C[2 * i].y1, C[2 * i + 1].y2 - C[2 * i].y2) == 1 for i in range(1, k)
    )
    union = set()
    for t in T:
        union.update(m % M for m in t.members())
    rep["delta"] = enc.residues() == union
    return rep


# formula pieces; expressions are (dict var -> coef, constant)


def _lin(expr, extra: dict):
    terms, const = expr
    out = dict(terms)
    for v, c in extra.items():
        out[v] = out.get(v, 0) + c
    return out, const


def _row(expr, extra, bound):
    """expr + extra <= bound as a row."""
    terms, const = _lin(expr, extra)
    return le(terms, bound - const)


def _neg(expr):
    terms, const = expr
    return {v: -c for v, c in terms.items()}, -const


def in_interval(var: str, mu: int, nu: int) -> Formula:
    return Formula.qf(AND(le({var: -1}, -mu), le({var: 1}, nu)))


def not_in_interval(var: str, mu: int, nu: int) -> Formula:
    return Formula.qf(OR(le({var: 1}, mu - 1), le({var: -1}, -nu - 1)))


def not_in_delta(expr, M: int, p: int, q: int, g1: int, tag: str = "") -> Formula:
    """forall y exists x: expr is not congruent to any chain point mod M.

    For y in the cone and above g1, either expr - y2 is a nonzero residue
    (witness x1 = quotient) or y is off the chain, i.e. the parallelogram
    v.y >= v.x >= 0, y2-1 >= x2 >= 1 holds an integer x.
    """
    y1, y2, x1, x2 = (f"y1{tag}", f"y2{tag}", f"x1{tag}", f"x2{tag}")
    mod_part = AND(
        _row(_neg(expr), {y2: 1, x1: M}, -1),  # 1 <= expr - y2 - M x1
        _row(expr, {y2: -1, x1: -M}, M - 1),  # expr - y2 - M x1 <= M - 1
    )
    off_cone = le({y1: p, y2: -q}, -1)  # v.y <= -1
    low = le({y2: 1}, g1 - 1)
    par = AND(
        le({x1: p, x2: -q, y1: -p, y2: q}, 0),  # v.x <= v.y
        le({x1: -p, x2: q}, 0),  # v.x >= 0
        le({x2: 1, y2: -1}, -1),  # x2 <= y2 - 1
        le({x2: -1}, -1),  # x2 >= 1
    )
    return Formula((("A", (y1, y2)), ("E", (x1, x2))), OR(mod_part, off_cone, low, par))


def in_delta(expr, M: int, p: int, q: int, g1: int, tag: str = "") -> Formula:
    """exists w forall t: w is a chain point and expr = w2 mod M."""
    w1, w2, t1, t2 = (f"w1{tag}", f"w2{tag}", f"t1{tag}", f"t2{tag}")
    congruent = OR(
        _row(expr, {w2: -1, t1: -M}, 0),  # expr - w2 - M t1 <= 0
        _row(_neg(expr), {w2: 1, t1: M}, -M),  # expr - w2 - M t1 >= M
    )
    free = OR(
        le({t1: -p, t2: q, w1: p, w2: -q}, -1),  # v.t >= v.w + 1
        le({t1: p, t2: -q}, -1),  # v.t <= -1
        le({w2: 1, t2: -1}, 0),  # t2 >= w2
        le({t2: 1}, 0),  # t2 <= 0
    )
    return Formula(
        (("E", (w1, w2)), ("A", (t1, t2))),
        AND(congruent, le({w1: -p, w2: q}, 0), le({w2: -1}, -g1), free),
    )


def _ranges_not_in_delta(tag, M, p, q, lo, hi):
    """Box for forall-y-exists-x given expr + shift in [lo, hi].

    Outside [0,q]x[0,p] every y satisfies the disjunction (off the cone,
    below g1, or off the chain so its parallelogram has a point); inside,
    witnesses are the quotient x1 = floor((expr - y2 - 1)/M) or a point of
    the parallelogram, which sits in [0,q]x[1,p-1].
    """
    return {
        f"y1{tag}": (0, q),
        f"y2{tag}": (0, p),
        f"x1{tag}": (min(0, (lo - p - 1) // M), max(q, (hi - 1) // M)),
        f"x2{tag}": (0, p),
    }


def _ranges_in_delta(tag, M, p, q, lo, hi):
    """Box for exists-w-forall-t: witnesses w are chain points; refuting t
    are the quotient t1 = floor((expr - w2 - 1)/M) or parallelogram points."""
    return {
        f"w1{tag}": (0, q),
        f"w2{tag}": (0, p),
        f"t1{tag}": (min(0, (lo - p - 1) // M), max(q, (hi - 1) // M)),
        f"t2{tag}": (0, p),
    }


def build_sentence3(enc: Encoding) -> ShortSentence:
    """exists z in [mu, nu] with z outside Delta: 5 variables, 10 rows."""
    src = enc.source
    body = f_and(
        in_interval("z", src.mu, src.nu),
        not_in_delta(({"z": 1}, 0), enc.M, enc.p, enc.q, enc.g1),
    )
    f = body.prepend("E", ("z",))
    meta = {
        "kind": "final",
        "J": [src.mu, src.nu],
        "M": [enc.M],
        "p": [enc.p],
        "q": [enc.q],
        "shift": [enc.shift],
    }
    return ShortSentence(f.blocks, f.matrix, meta)


def sentence3_box(enc: Encoding) -> dict:
    box = {"z": (enc.source.mu, enc.source.nu)}
    box.update(_ranges_not_in_delta("", enc.M, enc.p, enc.q, enc.source.mu, enc.source.nu))
    return box


def _window(inst: MAPCoverInstance, t: int) -> tuple[int, int]:
    if t < inst.m - 1:
        return inst.intervals[t]
    return inst.combination_range()


def encode_groups(inst: MAPCoverInstance) -> list[Encoding]:
    """One encoding per group over its own window: J_t for outer groups, the
    range of the tau-combination for the last."""
    out = []
    for t in range(inst.m):
        lo, hi = _window(inst, t)
        out.append(encode_instance(APCoverInstance(lo, hi, inst.groups[t])))
    return out


_BLOCK_LETTERS = "zwyxuvsr"


def _canonical_names(f: Formula) -> tuple[Formula, dict]:
    mapping = {}
    blocks = []
    for b, (q, vs) in enumerate(f.blocks):
        letter = _BLOCK_LETTERS[b % len(_BLOCK_LETTERS)]
        if b >= len(_BLOCK_LETTERS):
            letter += str(b // len(_BLOCK_LETTERS))
        names = (letter,) if len(vs) == 1 else tuple(f"{letter}{i + 1}" for i in range(len(vs)))
        mapping.update(zip(vs, names))
        blocks.append((q, names))
    return Formula(tuple(blocks), tree_map_rows(f.matrix, lambda r: r.renamed(mapping))), mapping


def _build_m(inst: MAPCoverInstance, encs):
    m = inst.m
    zs = [f"z{t + 1}" for t in range(m)]
    ranges = {}

    def params(t):
        e = encs[t]
        return e.M, e.p, e.q, e.g1

    def note(piece_ranges):
        ranges.update(piece_ranges)

    def rec(t):
        mu, nu = inst.intervals[t]
        ranges[zs[t]] = (mu, nu)
        e = encs[t]
        tag = f"g{t}"
        if t == m - 1:
            comb = {zs[s]: inst.taus[s] for s in range(m) if inst.taus[s]}
            lo, hi = inst.combination_range()
            note(_ranges_not_in_delta(tag, e.M, e.p, e.q, lo + e.shift, hi + e.shift))
            inner = f_and(
                in_interval(zs[t], mu, nu),
                not_in_delta((comb, e.shift), *params(t), tag=tag),
            )
            return inner.prepend("E", (zs[t],))
        rest = rec(t + 1)
        z = ({zs[t]: 1}, e.shift)
        lo, hi = mu + e.shift, nu + e.shift
        if inst.quantifiers[t] == "A":
            note(_ranges_in_delta(tag, e.M, e.p, e.q, lo, hi))
            body = f_or(
                not_in_interval(zs[t], mu, nu),
                in_delta(z, *params(t), tag=tag),
                rest,
            )
        else:
            note(_ranges_not_in_delta(tag, e.M, e.p, e.q, lo, hi))
            body = f_and(
                in_interval(zs[t], mu, nu),
                not_in_delta(z, *params(t), tag=tag),
                rest,
            )
        return body.prepend(inst.quantifiers[t], (zs[t],))

    f = rec(0)
    return f, ranges


def build_sentence_m(inst: MAPCoverInstance, encodings: list[Encoding] | None = None) -> ShortSentence:
    """Prenex sentence equivalent to decide_mapcover(inst).

    Outer groups: forall z_t [z_t not in J_t  or  z_t in Delta_t  or  rest],
    exists z_t [z_t in J_t  and  z_t not in Delta_t  and  rest]; the innermost
    exists z_m [z_m in J_m and tau.z not in Delta_m]. Membership uses
    exists-w-forall-t and non-membership forall-y-exists-x, each 8 rows, and
    the prenex combinators fuse blocks so that m = 2 gives 9 variables.
    """
    encs = encodings if encodings is not None else encode_groups(inst)
    f, _ = _build_m(inst, encs)
    f, _ = _canonical_names(f)
    meta = {
        "kind": "merged",
        "prefix": inst.quantifiers,
        "taus": list(inst.taus),
        "J": [x for iv in inst.intervals for x in iv],
        "M": [e.M for e in encs],
        "p": [e.p for e in encs],
        "q": [e.q for e in encs],
        "shift": [e.shift for e in encs],
    }
    return ShortSentence(f.blocks, f.matrix, meta)


def sentence_m_box(inst: MAPCoverInstance, encodings: list[Encoding] | None = None) -> dict:
    """Sound evaluation box for build_sentence_m, keyed by its variable names.

    Variables identified by the merge get the hull of their ranges.
    """
    encs = encodings if encodings is not None else encode_groups(inst)
    f, ranges = _build_m(inst, encs)
    _, mapping = _canonical_names(f)
    box: dict[str, tuple[int, int]] = {}
    merged = f.alias_map()
    for name, rng in ranges.items():
        tgt = mapping.get(merged.get(name, name))
        if tgt is None:
            continue
        lo, hi = rng
        if tgt in box:
            lo, hi = min(lo, box[tgt][0]), max(hi, box[tgt][1])
        box[tgt] = (lo, hi)
    return box


def chains_from_endpoint(p: int, q: int) -> ConvergentChains:
    """The chains are determined by their endpoint (q, p): the odd-length
    expansion of p/q is unique."""
    return convergents(to_odd_cfrac(Fraction(p, q)))
