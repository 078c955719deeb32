"""3-CNF / QBF front end and the prime-residue reductions to AP covers."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct

import numpy as np

from shortpa.apcover import APCoverInstance, APTriple, MAPCoverInstance
from shortpa.exactmath import ScaleError, crt_solve, first_primes, product

MAX_VARS = 24


@dataclass(frozen=True)
class Cnf3:
    num_vars: int
    clauses: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for c in self.clauses:
            if len(c) != 3:
                raise ValueError(f"clause {c} does not have 3 literals")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} outside 1..{self.num_vars}")

    def satisfied_by(self, assignment) -> bool:
        """assignment[i-1] is the value of variable i."""
        return all(
            any(assignment[abs(l) - 1] == (l > 0) for l in clause) for clause in self.clauses
        )


@dataclass(frozen=True)
class QbfInstance:
    """Blocks outermost first, each ('A' or 'E', variables); innermost is 'E'."""

    blocks: tuple[tuple[str, tuple[int, ...]], ...]
    matrix: Cnf3

    def __post_init__(self):
        blocks = tuple((q, tuple(vs)) for q, vs in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks or blocks[-1][0] != "E":
            raise ValueError("innermost block must be existential")
        for (a, _), (b, _) in zip(blocks, blocks[1:]):
            if a == b:
                raise ValueError("blocks must alternate")
        seen = [v for _, vs in blocks for v in vs]
        if sorted(seen) != list(range(1, self.matrix.num_vars + 1)):
            raise ValueError("blocks must partition the variables 1..num_vars")


def count_sat(f: Cnf3) -> int:
    n = f.num_vars
    if n > MAX_VARS:
        raise ScaleError(f"{n} variables exceeds the enumeration limit {MAX_VARS}")
    total = 0
    chunk = 1 << min(n, 20)
    for base in range(0, 1 << n, chunk):
        idx = np.arange(base, base + chunk, dtype=np.int64)
        ok = np.ones(chunk, dtype=bool)
        for clause in f.clauses:
            sat = np.zeros(chunk, dtype=bool)
            for lit in clause:
                bit = ((idx >> (abs(lit) - 1)) & 1).astype(bool)
                sat |= bit if lit > 0 else ~bit
            ok &= sat
        total += int(ok.sum())
    return total


def decide_qbf(f: QbfInstance) -> bool:
    if f.matrix.num_vars > MAX_VARS:
        raise ScaleError("too many variables for brute force")
    values = [False] * f.matrix.num_vars

    def rec(t: int) -> bool:
        if t == len(f.blocks):
            return f.matrix.satisfied_by(values)
        q, vs = f.blocks[t]
        for bits in iproduct((False, True), repeat=len(vs)):
            for v, b in zip(vs, bits):
                values[v - 1] = b
            r = rec(t + 1)
            if q == "E" and r:
                return True
            if q == "A" and not r:
                return False
        return q == "A"

    return rec(0)


def _falsifying(clause, prime_of):
    """CRT data (residue, prime) for the assignment falsifying the clause, or
    None when the clause is a tautology."""
    want = {}
    for lit in clause:
        r = 0 if lit > 0 else 1
        v = abs(lit)
        if want.get(v, r) != r:
            return None
        want[v] = r
    return sorted((r, prime_of[v]) for v, r in want.items())


def _progression_in_window(residue: int, modulus: int, lo: int, hi: int):
    """The class residue mod modulus restricted to [lo, hi] as an AP triple."""
    g = lo + (residue - lo) % modulus
    if g > hi:
        return None
    return APTriple(g, (hi - g) // modulus, modulus)


def _exclusions(primes, lo, hi):
    out = []
    for p in primes:
        for t in range(2, p):
            ap = _progression_in_window(t, p, lo, hi)
            if ap is not None:
                out.append(ap)
    return out


@dataclass(frozen=True)
class SatReduction:
    instance: APCoverInstance
    primes: tuple[int, ...]
    parity_trick: bool

    def decode(self, z: int) -> tuple[bool, ...]:
        return tuple(z % p == 1 for p in self.primes)

    def encode(self, assignment) -> int:
        res = [(int(bool(a)), p) for a, p in zip(assignment, self.primes)]
        if self.parity_trick:
            res.append((1, 2))
        return crt_solve(res)


def reduce_3sat_to_apcover(f: Cnf3, parity_trick: bool = False) -> SatReduction:
    n = f.num_vars
    if n > MAX_VARS:
        raise ScaleError(f"{n} variables exceeds the reduction limit {MAX_VARS}")
    primes = first_primes(n, offset=1 if parity_trick else 0)
    P = product(primes)
    # with the parity trick the odd residue mod 2 is part of the CRT system
    hi = (2 * P if parity_trick else P) - 1
    prime_of = {i + 1: p for i, p in enumerate(primes)}
    triples = _exclusions(primes, 0, hi)
    for clause in f.clauses:
        data = _falsifying(clause, prime_of)
        if data is None:
            continue
        ap = _progression_in_window(crt_solve(data), product(p for _, p in data), 0, hi)
        if ap is not None:
            triples.append(ap)
    if parity_trick:
        triples.append(APTriple(0, hi // 2, 2))
    return SatReduction(APCoverInstance(0, hi, tuple(triples)), tuple(primes), parity_trick)


def block_taus(products) -> list[int]:
    """tau_t = 1 mod products[t] and 0 mod every other block product."""
    taus = []
    for t, P in enumerate(products):
        res = [(1 % P, P)] + [(0, Q) for s, Q in enumerate(products) if s != t]
        taus.append(crt_solve(res))
    return taus


def reduce_qbf_to_mapcover(f: QbfInstance, max_vars: int = 20) -> MAPCoverInstance:
    n = f.matrix.num_vars
    if n > max_vars:
        raise ScaleError(f"{n} variables exceeds the reduction limit {max_vars}")
    primes = first_primes(n)
    prime_of = {i + 1: p for i, p in enumerate(primes)}
    block_primes = [[prime_of[v] for v in vs] for _, vs in f.blocks]
    products = [product(bp) for bp in block_primes]
    taus = block_taus(products)
    m = len(f.blocks)
    intervals = [(0, P - 1) for P in products]
    groups = [_exclusions(block_primes[t], 0, products[t] - 1) for t in range(m - 1)]
    cmax = sum(tau * (P - 1) for tau, P in zip(taus, products))
    last = _exclusions(block_primes[-1], 0, cmax)
    for clause in f.matrix.clauses:
        data = _falsifying(clause, prime_of)
        if data is None:
            continue
        ap = _progression_in_window(crt_solve(data), product(p for _, p in data), 0, cmax)
        if ap is not None:
            last.append(ap)
    groups.append(last)
    return MAPCoverInstance(
        tuple(intervals),
        tuple(tuple(g) for g in groups),
        tuple(taus),
        "".join(q for q, _ in f.blocks),
        meta={"block_primes": block_primes},
    )


# DIMACS / QDIMACS


class DimacsError(ValueError):
    pass


def _pad3(lits, lineno):
    if not lits:
        raise DimacsError(f"line {lineno}: empty clause")
    if len(lits) > 3:
        raise DimacsError(f"line {lineno}: clause has {len(lits)} literals, at most 3 allowed")
    while len(lits) < 3:
        lits.append(lits[-1])
    return tuple(lits)


def _parse(text: str):
    num_vars = None
    prefix = []
    clauses = []
    pending: list[int] = []
    pending_line = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: bad problem line")
            try:
                num_vars = int(parts[2])
            except ValueError:
                raise DimacsError(f"line {lineno}: bad variable count") from None
            continue
        if num_vars is None:
            raise DimacsError(f"line {lineno}: data before the problem line")
        if parts[0] in ("a", "e"):
            try:
                vs = [int(x) for x in parts[1:]]
            except ValueError:
                raise DimacsError(f"line {lineno}: bad quantifier line") from None
            if not vs or vs[-1] != 0:
                raise DimacsError(f"line {lineno}: quantifier line must end with 0")
            prefix.append((parts[0].upper(), vs[:-1], lineno))
            continue
        try:
            nums = [int(x) for x in parts]
        except ValueError:
            raise DimacsError(f"line {lineno}: bad clause line") from None
        for x in nums:
            if x == 0:
                clauses.append(_pad3(pending, pending_line or lineno))
                pending = []
                pending_line = 0
            else:
                if abs(x) > num_vars:
                    raise DimacsError(f"line {lineno}: literal {x} exceeds {num_vars} variables")
                if not pending:
                    pending_line = lineno
                pending.append(x)
    if pending:
        raise DimacsError(f"line {pending_line}: clause not terminated by 0")
    if num_vars is None:
        raise DimacsError("missing problem line")
    return num_vars, prefix, clauses


def loads_dimacs(text: str) -> Cnf3:
    num_vars, prefix, clauses = _parse(text)
    if prefix:
        raise DimacsError(f"line {prefix[0][2]}: quantifier line in a plain CNF")
    return Cnf3(num_vars, tuple(clauses))


def loads_qdimacs(text: str) -> QbfInstance:
    num_vars, prefix, clauses = _parse(text)
    blocks: list[tuple[str, list[int]]] = []
    seen = set()
    for q, vs, lineno in prefix:
        for v in vs:
            if v in seen or not 1 <= v <= num_vars:
                raise DimacsError(f"line {lineno}: variable {v} repeated or out of range")
            seen.add(v)
        if blocks and blocks[-1][0] == q:
            blocks[-1][1].extend(vs)
        else:
            blocks.append((q, list(vs)))
    free = [v for v in range(1, num_vars + 1) if v not in seen]
    if free:
        # free variables are existential at the outermost level
        if blocks and blocks[0][0] == "E":
            blocks[0][1][:0] = free
        else:
            blocks.insert(0, ("E", free))
    if not blocks or blocks[-1][0] == "A":
        blocks.append(("E", []))
    return QbfInstance(tuple((q, tuple(vs)) for q, vs in blocks), Cnf3(num_vars, tuple(clauses)))


def dumps_dimacs(f: Cnf3) -> str:
    lines = [f"p cnf {f.num_vars} {len(f.clauses)}"]
    lines += [" ".join(map(str, c)) + " 0" for c in f.clauses]
    return "\n".join(lines) + "\n"


def dumps_qdimacs(f: QbfInstance) -> str:
    lines = [f"p cnf {f.matrix.num_vars} {len(f.matrix.clauses)}"]
    lines += [f"{q.lower()} " + " ".join(map(str, vs)) + " 0" for q, vs in f.blocks if vs]
    lines += [" ".join(map(str, c)) + " 0" for c in f.matrix.clauses]
    return "\n".join(lines) + "\n"


def random_cnf(rng, num_vars: int, num_clauses: int) -> Cnf3:
    clauses = []
    for _ in range(num_clauses):
        clauses.append(
            tuple(rng.choice((1, -1)) * rng.randint(1, num_vars) for _ in range(3))
        )
    return Cnf3(num_vars, tuple(clauses))


def random_qbf(rng, num_vars: int, num_blocks: int, num_clauses: int) -> QbfInstance:
    """Blocks alternate and end with E; each block gets at least one variable."""
    if not 1 <= num_blocks <= num_vars:
        raise ValueError(f"need 1 <= blocks <= variables, got {num_blocks} and {num_vars}")
    vs = list(range(1, num_vars + 1))
    cuts = sorted(rng.sample(range(1, num_vars), num_blocks - 1)) if num_blocks > 1 else []
    parts = [vs[i:j] for i, j in zip([0] + cuts, cuts + [num_vars])]
    qs = ["E" if (num_blocks - 1 - t) % 2 == 0 else "A" for t in range(num_blocks)]
    return QbfInstance(tuple(zip(qs, map(tuple, parts))), random_cnf(rng, num_vars, num_clauses))
