"""Prenex sentences over integer linear inequalities.

Matrices are AND/OR trees of rows sum(a_v * v) <= c; there is no negation
(strict inequalities are sharpened before they get here). Two evaluators:
a generic bounded one, and a certified one for the cover-encoding families
that replaces the universal block by the finite chain of the encoding.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product as iproduct

import numpy as np

from shortpa.exactmath import ScaleError

LEVEL_SCALE = 10**7
_VEC_CELLS = 4_000_000


@dataclass(frozen=True)
class Row:
    """sum(coef * var) <= bound."""

    coeffs: tuple[tuple[str, int], ...]
    bound: int

    @classmethod
    def of(cls, terms: dict, bound: int) -> "Row":
        return cls(tuple(sorted((v, int(c)) for v, c in terms.items() if c != 0)), int(bound))

    def value(self, env) -> int:
        return sum(c * env[v] for v, c in self.coeffs)

    def variables(self) -> set[str]:
        return {v for v, _ in self.coeffs}

    def negated(self) -> "Row":
        # not (a.x <= c)  <=>  -a.x <= -c - 1
        return Row(tuple((v, -c) for v, c in self.coeffs), -self.bound - 1)

    def renamed(self, mapping) -> "Row":
        acc: dict[str, int] = {}
        for v, c in self.coeffs:
            w = mapping.get(v, v)
            acc[w] = acc.get(w, 0) + c
        return Row.of(acc, self.bound)


@dataclass(frozen=True)
class And:
    children: tuple = ()


@dataclass(frozen=True)
class Or:
    children: tuple = ()


def le(terms: dict, bound: int) -> Row:
    return Row.of(terms, bound)


def ge(terms: dict, bound: int) -> Row:
    return Row.of({v: -c for v, c in terms.items()}, -bound)


def AND(*kids):
    return And(tuple(kids))


def OR(*kids):
    return Or(tuple(kids))


def rows_of(tree) -> list[Row]:
    if isinstance(tree, Row):
        return [tree]
    out = []
    for ch in tree.children:
        out.extend(rows_of(ch))
    return out


def tree_map_rows(tree, fn):
    if isinstance(tree, Row):
        return fn(tree)
    return type(tree)(tuple(tree_map_rows(ch, fn) for ch in tree.children))


def negate_tree(tree):
    if isinstance(tree, Row):
        return tree.negated()
    kind = Or if isinstance(tree, And) else And
    return kind(tuple(negate_tree(ch) for ch in tree.children))


def eval_expr(tree, assignment) -> bool:
    if isinstance(tree, Row):
        for v, _ in tree.coeffs:
            if v not in assignment:
                raise KeyError(f"variable {v!r} has no value")
        return tree.value(assignment) <= tree.bound
    if isinstance(tree, And):
        return all(eval_expr(ch, assignment) for ch in tree.children)
    if isinstance(tree, Or):
        return any(eval_expr(ch, assignment) for ch in tree.children)
    raise TypeError(f"not a formula node: {tree!r}")


# prenex formulas and the quantifier-merging combinators


@dataclass(frozen=True)
class Formula:
    blocks: tuple[tuple[str, tuple[str, ...]], ...]
    matrix: object
    # bound names identified with another during merging, old -> surviving
    aliases: tuple = field(default=(), compare=False)

    @classmethod
    def qf(cls, matrix) -> "Formula":
        return cls((), matrix)

    def bound_vars(self) -> list[str]:
        return [v for _, vs in self.blocks for v in vs]

    def prepend(self, q: str, names) -> "Formula":
        names = tuple(names)
        if self.blocks and self.blocks[0][0] == q:
            return Formula(
                ((q, names + self.blocks[0][1]),) + self.blocks[1:], self.matrix, self.aliases
            )
        return Formula(((q, names),) + self.blocks, self.matrix, self.aliases)

    def alias_map(self) -> dict[str, str]:
        """Where each merged-away bound name ended up."""
        out = dict(self.aliases)
        for k in out:
            while out[k] in out:
                out[k] = out[out[k]]
        return out


def _merge_cost(F, G, d, share_q):
    fb, gb = F.blocks, G.blocks
    total = 0
    lo = min(0, d)
    hi = max(len(fb), len(gb) + d)
    for pos in range(lo, hi):
        f = fb[pos] if 0 <= pos < len(fb) else None
        j = pos - d
        g = gb[j] if 0 <= j < len(gb) else None
        if f and g:
            if f[0] != g[0]:
                return None
            a, b = len(f[1]), len(g[1])
            total += max(a, b) if f[0] == share_q else a + b
        elif f:
            total += len(f[1])
        elif g:
            total += len(g[1])
    return total, hi - lo


def _combine(F: Formula, G: Formula, kind) -> Formula:
    """Prenex form of F op G; op is And or Or.

    G's prefix is aligned against F's at the offset giving the fewest
    quantifier blocks, then the fewest bound variables. Aligned blocks with the same quantifier are fused; when the
    quantifier distributes over op (forall over and, exists over or) G's
    variables are identified with F's instead of appended.
    """
    share_q = "A" if kind is And else "E"
    clash = set(F.bound_vars()) & set(G.bound_vars())
    if clash:
        raise ValueError(f"bound variables clash: {sorted(clash)}")
    best = None
    for d in range(-len(G.blocks) - len(F.blocks), len(F.blocks) + len(G.blocks) + 1):
        c = _merge_cost(F, G, d, share_q)
        if c is None:
            continue
        key = (c[1], c[0], abs(d), -d)
        if best is None or key < best[0]:
            best = (key, d)
    d = best[1]
    fb, gb = F.blocks, G.blocks
    rename: dict[str, str] = {}
    blocks = []
    for pos in range(min(0, d), max(len(fb), len(gb) + d)):
        f = fb[pos] if 0 <= pos < len(fb) else None
        j = pos - d
        g = gb[j] if 0 <= j < len(gb) else None
        if f and g:
            if f[0] == share_q:
                names = list(f[1])
                for i, v in enumerate(g[1]):
                    if i < len(names):
                        rename[v] = names[i]
                    else:
                        names.append(v)
                blocks.append((f[0], tuple(names)))
            else:
                blocks.append((f[0], f[1] + g[1]))
        else:
            blocks.append(f or g)
    gm = tree_map_rows(G.matrix, lambda r: r.renamed(rename)) if rename else G.matrix
    fm = F.matrix
    parts = []
    for m in (fm, gm):
        parts.extend(m.children if isinstance(m, kind) else (m,))
    aliases = F.aliases + G.aliases + tuple(rename.items())
    return Formula(tuple(blocks), kind(tuple(parts)), aliases)


def f_and(*fs: Formula) -> Formula:
    out = fs[0]
    for f in fs[1:]:
        out = _combine(out, f, And)
    return out


def f_or(*fs: Formula) -> Formula:
    out = fs[0]
    for f in fs[1:]:
        out = _combine(out, f, Or)
    return out


# sentences


@dataclass
class ShortSentence:
    prefix: tuple[tuple[str, tuple[str, ...]], ...]
    matrix: object
    meta: dict = field(default_factory=dict)

    def variables(self) -> list[str]:
        return [v for _, vs in self.prefix for v in vs]

    @property
    def num_variables(self) -> int:
        return len(self.variables())

    @property
    def num_inequalities(self) -> int:
        return len(rows_of(self.matrix))

    def shape(self) -> tuple[int, ...]:
        return tuple(len(vs) for _, vs in self.prefix)

    def quantifiers(self) -> str:
        return "".join(q for q, _ in self.prefix)

    def __eq__(self, other):
        return (
            isinstance(other, ShortSentence)
            and self.prefix == other.prefix
            and self.matrix == other.matrix
            and self.meta == other.meta
        )


def negate_sentence(s: ShortSentence) -> ShortSentence:
    flip = {"A": "E", "E": "A"}
    prefix = tuple((flip[q], vs) for q, vs in s.prefix)
    return ShortSentence(prefix, negate_tree(s.matrix), {})


# bounded evaluation


class _Compiled:
    """Rows as integer arrays over the box points of each block."""

    def __init__(self, sentence: ShortSentence, box: dict):
        self.sentence = sentence
        self.blocks = sentence.prefix
        self.rows = rows_of(sentence.matrix)
        self.points = []
        for _, vs in self.blocks:
            ranges = []
            for v in vs:
                if v not in box:
                    raise KeyError(f"box has no range for variable {v!r}")
                lo, hi = box[v]
                if lo > hi:
                    raise ValueError(f"empty range for {v!r}")
                ranges.append(range(lo, hi + 1))
            n = 1
            for r in ranges:
                n *= len(r)
            if n > LEVEL_SCALE:
                raise ScaleError(f"block {vs} has {n} box points, limit {LEVEL_SCALE}")
            self.points.append(np.array(list(iproduct(*ranges)), dtype=object).reshape(n, len(vs)))
        where = {}
        for b, (_, vs) in enumerate(self.blocks):
            for i, v in enumerate(vs):
                where[v] = (b, i)
        for r in self.rows:
            for v in r.variables():
                if v not in where:
                    raise KeyError(f"free variable {v!r} in the matrix")
        # contributions[b][row] = array over block b's points
        mag = 0
        self.contrib = []
        for b, (_, vs) in enumerate(self.blocks):
            pts = self.points[b]
            per_row = []
            for r in self.rows:
                col = np.zeros(len(pts), dtype=object)
                for v, c in r.coeffs:
                    bb, i = where[v]
                    if bb == b:
                        col = col + c * pts[:, i]
                per_row.append(col)
            arr = np.array(per_row, dtype=object).reshape(len(self.rows), len(pts))
            if arr.size:
                mag += int(np.max(np.abs(arr)))
            self.contrib.append(arr)
        bmax = max((abs(r.bound) for r in self.rows), default=0)
        dtype = np.int64 if mag + bmax < 2**62 else object
        self.contrib = [a.astype(dtype) for a in self.contrib]
        self.bounds = np.array([r.bound for r in self.rows], dtype=dtype)
        self.dtype = dtype
        self.index = {id(r): i for i, r in enumerate(self.rows)}

    def _tree(self, node, leaf):
        if isinstance(node, Row):
            return leaf(node)
        vals = [self._tree(ch, leaf) for ch in node.children]
        if isinstance(node, And):
            if not vals:
                return True
            out = vals[0]
            for v in vals[1:]:
                out = out & v
            return out
        if not vals:
            return False
        out = vals[0]
        for v in vals[1:]:
            out = out | v
        return out

    def evaluate(self, outer_choice: list[int]) -> bool:
        """Truth of the sentence given point indices for the outer blocks;
        the remaining (at most two) blocks are evaluated with arrays."""
        nb = len(self.blocks)
        depth = len(outer_choice)
        base = np.zeros(len(self.rows), dtype=self.dtype)
        for b, idx in enumerate(outer_choice):
            base = base + self.contrib[b][:, idx]
        rest = nb - depth
        if rest == 0:
            vals = base <= self.bounds
            return bool(self._tree(self.sentence.matrix, lambda r: bool(vals[self._ri(r)])))
        if rest == 1:
            last = self.contrib[-1]
            slack = (self.bounds - base)[:, None]
            ok = last <= slack
            res = self._tree(self.sentence.matrix, lambda r: ok[self._ri(r)])
            res = np.broadcast_to(res, (last.shape[1],))
            return bool(res.any() if self.blocks[-1][0] == "E" else res.all())
        a, b = self.contrib[-2], self.contrib[-1]
        slack = self.bounds - base
        na, nbb = a.shape[1], b.shape[1]
        step = max(1, _VEC_CELLS // max(1, nbb))
        qa, qb = self.blocks[-2][0], self.blocks[-1][0]
        for start in range(0, na, step):
            sl = slice(start, min(na, start + step))
            cache = {}

            def leaf(r):
                i = self._ri(r)
                if i not in cache:
                    cache[i] = (a[i, sl][:, None] + b[i][None, :]) <= slack[i]
                return cache[i]

            res = self._tree(self.sentence.matrix, leaf)
            res = np.broadcast_to(res, (sl.stop - sl.start, nbb))
            inner = res.any(axis=1) if qb == "E" else res.all(axis=1)
            if qa == "E" and inner.any():
                return True
            if qa == "A" and not inner.all():
                return False
        return qa == "A"

    def _ri(self, r):
        return self.index[id(r)]


def _walk(comp: _Compiled, choice: list[int]) -> bool:
    nb = len(comp.blocks)
    if nb - len(choice) <= 2:
        return comp.evaluate(choice)
    b = len(choice)
    q = comp.blocks[b][0]
    for i in range(len(comp.points[b])):
        r = _walk(comp, choice + [i])
        if q == "E" and r:
            return True
        if q == "A" and not r:
            return False
    return q == "A"


def decide_bounded(sentence: ShortSentence, box: dict) -> bool:
    """Exhaustive evaluation with every variable restricted to its box range.

    Exact for the box; whether the box is faithful to the unbounded sentence
    is the caller's responsibility.
    """
    comp = _Compiled(sentence, box)
    return _walk(comp, [])


def count_bounded(sentence: ShortSentence, box: dict) -> int:
    """Number of points of the outermost (existential) block for which the
    rest of the sentence holds."""
    comp = _Compiled(sentence, box)
    if not comp.blocks:
        return int(eval_expr(sentence.matrix, {}))
    return sum(1 for i in range(len(comp.points[0])) if _walk(comp, [i]))


# text format

_TOKEN = re.compile(r"\(|\)|\[|\]|<=|-?\d+|[A-Za-z_][A-Za-z0-9_]*")


class SentenceFormatError(ValueError):
    pass


def dumps_sentence(s: ShortSentence) -> str:
    names = s.variables()
    lines = ["SENTENCE"]
    for q, vs in s.prefix:
        lines.append(f"{q} {len(vs)} " + " ".join(vs))
    for key in sorted(s.meta):
        val = s.meta[key]
        vals = list(val) if isinstance(val, (list, tuple)) else [val]
        lines.append(f"META {key} " + " ".join(str(v) for v in vals))

    def emit(node, depth):
        pad = "  " * depth
        if isinstance(node, Row):
            coef = dict(node.coeffs)
            vec = " ".join(str(coef.get(v, 0)) for v in names)
            lines.append(f"{pad}[{vec}] <= {node.bound}")
            return
        tag = "and" if isinstance(node, And) else "or"
        if not node.children:
            lines.append(f"{pad}({tag})")
            return
        lines.append(f"{pad}({tag}")
        for ch in node.children:
            emit(ch, depth + 1)
        lines.append(f"{pad})")

    emit(s.matrix, 0)
    return "\n".join(lines) + "\n"


def _meta_value(parts):
    try:
        return [int(t) for t in parts]
    except ValueError:
        if len(parts) != 1:
            raise
        return parts[0]


def loads_sentence(text: str) -> ShortSentence:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "SENTENCE":
        raise SentenceFormatError("line 1: expected SENTENCE header")
    prefix = []
    meta = {}
    i = 1
    while i < len(lines):
        parts = lines[i].split()
        if not parts:
            i += 1
            continue
        if parts[0] in ("E", "A"):
            try:
                n = int(parts[1])
            except (IndexError, ValueError):
                raise SentenceFormatError(f"line {i + 1}: bad block line") from None
            if len(parts) != n + 2:
                raise SentenceFormatError(f"line {i + 1}: block declares {n} variables")
            prefix.append((parts[0], tuple(parts[2:])))
        elif parts[0] == "META":
            if len(parts) < 3:
                raise SentenceFormatError(f"line {i + 1}: META needs a key and a value")
            try:
                meta[parts[1]] = _meta_value(parts[2:])
            except ValueError:
                raise SentenceFormatError(f"line {i + 1}: META value must be integers or one word") from None
        else:
            break
        i += 1
    names = [v for _, vs in prefix for v in vs]
    if len(set(names)) != len(names):
        raise SentenceFormatError("duplicate variable names in the prefix")
    toks = []
    for j in range(i, len(lines)):
        for m in _TOKEN.finditer(lines[j]):
            toks.append((m.group(), j + 1))
        rest = _TOKEN.sub("", lines[j]).strip()
        if rest:
            raise SentenceFormatError(f"line {j + 1}: unexpected text {rest!r}")
    pos = 0

    def take():
        nonlocal pos
        if pos >= len(toks):
            raise SentenceFormatError("unexpected end of input")
        t = toks[pos]
        pos += 1
        return t

    def parse():
        tok, ln = take()
        if tok == "(":
            kind, ln2 = take()
            if kind not in ("and", "or"):
                raise SentenceFormatError(f"line {ln2}: expected and/or, got {kind!r}")
            kids = []
            while pos < len(toks) and toks[pos][0] != ")":
                kids.append(parse())
            take()
            return And(tuple(kids)) if kind == "and" else Or(tuple(kids))
        if tok == "[":
            coefs = []
            while True:
                t, ln2 = take()
                if t == "]":
                    break
                try:
                    coefs.append(int(t))
                except ValueError:
                    raise SentenceFormatError(f"line {ln2}: bad coefficient {t!r}") from None
            if len(coefs) != len(names):
                raise SentenceFormatError(
                    f"line {ln}: row has {len(coefs)} coefficients, expected {len(names)}"
                )
            t, ln2 = take()
            if t != "<=":
                raise SentenceFormatError(f"line {ln2}: expected '<='")
            t, ln2 = take()
            try:
                bound = int(t)
            except ValueError:
                raise SentenceFormatError(f"line {ln2}: bad bound {t!r}") from None
            return Row.of(dict(zip(names, coefs)), bound)
        raise SentenceFormatError(f"line {ln}: unexpected token {tok!r}")

    matrix = parse()
    if pos != len(toks):
        raise SentenceFormatError(f"line {toks[pos][1]}: trailing tokens")
    return ShortSentence(tuple(prefix), matrix, meta)


# certified evaluation for sentences produced by the cover encoders


class CertificationError(ValueError):
    pass


def _delta_tests(meta):
    from shortpa.contfrac import chain_residues
    from shortpa.encode import chains_from_endpoint

    tests = []
    for M, p, q, s in zip(meta["M"], meta["p"], meta["q"], meta["shift"]):
        ch = chains_from_endpoint(p, q)
        res = chain_residues(ch, ch.cf.a[0], M)
        tests.append((M, s, res))
    return tests


def _check_structure(sentence: ShortSentence):
    from shortpa import encode

    kind = sentence.meta.get("kind")
    if kind not in ("final", "merged"):
        raise CertificationError("sentence carries no encoding metadata")
    try:
        rebuilt = _rebuild(sentence.meta)
    except (KeyError, ValueError, TypeError) as exc:
        raise CertificationError(f"unusable encoding metadata: {exc}") from None
    if rebuilt.prefix != sentence.prefix or rebuilt.matrix != sentence.matrix:
        raise CertificationError("sentence does not match the encoding it claims")
    return encode


def _rebuild(meta) -> ShortSentence:
    from shortpa import encode
    from shortpa.apcover import APCoverInstance, MAPCoverInstance

    class _Enc:
        def __init__(self, M, p, q, shift):
            ch = encode.chains_from_endpoint(p, q)
            self.M, self.p, self.q, self.shift = M, p, q, shift
            self.g1 = ch.cf.a[0]

    encs = [_Enc(*t) for t in zip(meta["M"], meta["p"], meta["q"], meta["shift"])]
    J = meta["J"]
    if meta["kind"] == "final":
        e = encs[0]
        e.source = APCoverInstance(J[0], J[1])
        return encode.build_sentence3(e)
    m = len(meta["prefix"])
    skeleton = MAPCoverInstance(
        tuple((J[2 * t], J[2 * t + 1]) for t in range(m)),
        tuple(() for _ in range(m)),
        tuple(meta["taus"]),
        meta["prefix"],
    )
    s = encode.build_sentence_m(skeleton, encs)
    s.meta = dict(meta)
    return s


def _certified_outer_values(sentence: ShortSentence):
    """Per outermost value, whether the rest holds; z ranges over J_1."""
    _check_structure(sentence)
    meta = sentence.meta
    tests = _delta_tests(meta)
    J = meta["J"]
    if meta["kind"] == "final":
        # z already lives in the normalized window; shift is informational
        M, _, res = tests[0]
        return [(z, z % M not in res) for z in range(J[0], J[1] + 1)]
    prefix = meta["prefix"]
    taus = meta["taus"]
    m = len(prefix)

    def outside(t, val):
        M, s, res = tests[t]
        return (val + s) % M not in res

    doms = []
    for t in range(m - 1):
        doms.append([z for z in range(J[2 * t], J[2 * t + 1] + 1) if outside(t, z)])
    doms.append(list(range(J[2 * (m - 1)], J[2 * m - 1] + 1)))

    def rec(t, acc):
        if t == m - 1:
            return any(outside(t, acc + taus[t] * z) for z in doms[t])
        branch = (rec(t + 1, acc + taus[t] * z) for z in doms[t])
        return any(branch) if prefix[t] == "E" else all(branch)

    return [(z, rec(1, taus[0] * z)) if m > 1 else (z, outside(0, taus[0] * z)) for z in doms[0]]


def decide_certified(sentence: ShortSentence) -> bool:
    """Truth via the chain: the universal block ranges over the finite set of
    chain points, so membership in Delta is a residue lookup."""
    vals = _certified_outer_values(sentence)
    if sentence.meta["kind"] == "final" or sentence.meta["prefix"][0] == "E":
        return any(ok for _, ok in vals)
    return all(ok for _, ok in vals)


def count_certified(sentence: ShortSentence) -> int:
    """Number of outermost values z in J_1 (outside Delta_1 for a merged
    sentence) for which the remainder holds."""
    return sum(1 for _, ok in _certified_outer_values(sentence) if ok)
