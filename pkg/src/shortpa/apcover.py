"""AP-COVER and its alternating m-group version, with brute-force oracles."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct

from shortpa import kernels
from shortpa.exactmath import ScaleError

DESK_SCALE = 10**7


@dataclass(frozen=True)
class APTriple:
    """AP(g, h, e) = {g + j*e : 0 <= j <= h}."""

    g: int
    h: int
    e: int

    def __post_init__(self):
        if self.e < 1 or self.h < 0:
            raise ValueError(f"bad progression {self}")

    @property
    def last(self) -> int:
        return self.g + self.h * self.e

    def members(self) -> list[int]:
        return [self.g + j * self.e for j in range(self.h + 1)]

    def __iter__(self):
        return iter((self.g, self.h, self.e))


@dataclass(frozen=True)
class APCoverInstance:
    mu: int
    nu: int
    triples: tuple[APTriple, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "triples", tuple(APTriple(*t) for t in self.triples))
        if self.mu > self.nu:
            raise ValueError(f"empty interval [{self.mu}, {self.nu}]")

    @property
    def k(self) -> int:
        return len(self.triples)


@dataclass(frozen=True)
class MAPCoverInstance:
    """Quantifier groups listed outermost first.

    Group t < m restricts the domain of z_t to J_t minus its progressions;
    the last group is tested against sum(taus[t] * z_t).
    """

    intervals: tuple[tuple[int, int], ...]
    groups: tuple[tuple[APTriple, ...], ...]
    taus: tuple[int, ...]
    quantifiers: str
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(tuple(iv) for iv in self.intervals))
        object.__setattr__(
            self, "groups", tuple(tuple(APTriple(*t) for t in grp) for grp in self.groups)
        )
        object.__setattr__(self, "taus", tuple(self.taus))
        m = len(self.quantifiers)
        if not (len(self.intervals) == len(self.groups) == len(self.taus) == m) or m == 0:
            raise ValueError("intervals, groups, taus and quantifiers must have equal length")
        if set(self.quantifiers) - {"A", "E"}:
            raise ValueError("quantifiers must be A or E")
        if self.quantifiers[-1] != "E":
            raise ValueError("innermost quantifier must be E")
        for a, b in zip(self.quantifiers, self.quantifiers[1:]):
            if a == b:
                raise ValueError("quantifiers must alternate")

    @property
    def m(self) -> int:
        return len(self.quantifiers)

    def combination_range(self) -> tuple[int, int]:
        lo = hi = 0
        for (mu, nu), tau in zip(self.intervals, self.taus):
            lo += min(tau * mu, tau * nu)
            hi += max(tau * mu, tau * nu)
        return lo, hi


def ap_member(z: int, t: APTriple) -> bool:
    g, h, e = t
    return z >= g and (z - g) % e == 0 and (z - g) // e <= h


def in_union(z: int, triples) -> bool:
    return any(ap_member(z, t) for t in triples)


def normalize(inst: APCoverInstance) -> tuple[APCoverInstance, int]:
    """Make every h >= 1, every g >= 2 and mu >= 1, preserving uncovered counts.

    Singletons outside J are dropped. A singleton {g} inside J becomes
    AP(g, 1, nu+1-g) after appending the point nu+1, which is then covered.
    Finally everything is translated by the returned shift.
    """
    mu, nu = inst.mu, inst.nu
    kept = []
    singles = []
    for t in inst.triples:
        if t.last < mu or t.g > nu:
            continue
        if t.h == 0:
            singles.append(t.g)
        else:
            kept.append(t)
    if singles:
        nu += 1
        kept.extend(APTriple(g, 1, nu - g) for g in singles)
    shift = max(0, 1 - mu)
    if kept:
        shift = max(shift, 2 - min(t.g for t in kept))
    out = APCoverInstance(
        mu + shift, nu + shift, tuple(APTriple(t.g + shift, t.h, t.e) for t in kept)
    )
    return out, shift


def is_normalized(inst: APCoverInstance) -> bool:
    return inst.mu >= 1 and all(t.g >= 2 and t.h >= 1 for t in inst.triples)


def _guard(size: int, max_scale: int) -> None:
    if size > max_scale:
        raise ScaleError(f"scan of {size} points exceeds the limit {max_scale}")


def uncovered(inst: APCoverInstance, max_scale: int = DESK_SCALE) -> list[int]:
    _guard(inst.nu - inst.mu + 1, max_scale)
    mask = kernels.uncovered_mask(inst.mu, inst.nu, inst.triples)
    return [inst.mu + i for i, bit in enumerate(mask) if bit]


def decide_apcover(inst: APCoverInstance, max_scale: int = DESK_SCALE) -> bool:
    _guard(inst.nu - inst.mu + 1, max_scale)
    return any(kernels.uncovered_mask(inst.mu, inst.nu, inst.triples))


def count_apcover(inst: APCoverInstance, max_scale: int = DESK_SCALE) -> int:
    _guard(inst.nu - inst.mu + 1, max_scale)
    return sum(kernels.uncovered_mask(inst.mu, inst.nu, inst.triples))


def decide_mapcover(inst: MAPCoverInstance, max_scale: int = DESK_SCALE) -> bool:
    size = 1
    for mu, nu in inst.intervals:
        size *= nu - mu + 1
    _guard(size, max_scale)
    m = inst.m
    domains = []
    for t in range(m - 1):
        mu, nu = inst.intervals[t]
        mask = kernels.uncovered_mask(mu, nu, inst.groups[t])
        domains.append([mu + i for i, bit in enumerate(mask) if bit])
    mu, nu = inst.intervals[-1]
    domains.append(list(range(mu, nu + 1)))

    lo, hi = inst.combination_range()
    last = inst.groups[-1]
    if hi - lo + 1 <= max_scale:
        free = kernels.uncovered_mask(lo, hi, last)

        def outside(c):
            return free[c - lo] == 1
    else:

        def outside(c):
            return not in_union(c, last)

    def rec(t: int, acc: int) -> bool:
        tau = inst.taus[t]
        if t == m - 1:
            return any(outside(acc + tau * z) for z in domains[t])
        branch = (rec(t + 1, acc + tau * z) for z in domains[t])
        return any(branch) if inst.quantifiers[t] == "E" else all(branch)

    return rec(0, 0)


def count_mapcover_witnesses(inst: MAPCoverInstance) -> int:
    """Number of full assignments (z_1..z_m) in the restricted domains with
    the combination outside the last group (ignores quantifiers)."""
    doms = []
    for t in range(inst.m - 1):
        mu, nu = inst.intervals[t]
        doms.append([z for z in range(mu, nu + 1) if not in_union(z, inst.groups[t])])
    mu, nu = inst.intervals[-1]
    doms.append(range(mu, nu + 1))
    return sum(
        1
        for zs in iproduct(*doms)
        if not in_union(sum(t * z for t, z in zip(inst.taus, zs)), inst.groups[-1])
    )


# text format


class FormatError(ValueError):
    pass


def _ints(parts, lineno):
    try:
        return [int(x) for x in parts]
    except ValueError:
        raise FormatError(f"line {lineno}: expected integers, got {' '.join(parts)!r}") from None


def _records(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def dumps_apcover(inst: APCoverInstance) -> str:
    lines = [f"J {inst.mu} {inst.nu}"]
    lines += [f"AP {t.g} {t.h} {t.e}" for t in inst.triples]
    return "\n".join(lines) + "\n"


def loads_apcover(text: str) -> APCoverInstance:
    J = None
    triples = []
    for lineno, parts in _records(text):
        tag = parts[0]
        if tag == "J" and len(parts) == 3:
            if J is not None:
                raise FormatError(f"line {lineno}: duplicate J record")
            J = _ints(parts[1:], lineno)
        elif tag == "AP" and len(parts) == 4:
            g, h, e = _ints(parts[1:], lineno)
            if e < 1 or h < 0:
                raise FormatError(f"line {lineno}: need h >= 0 and e >= 1")
            triples.append(APTriple(g, h, e))
        else:
            raise FormatError(f"line {lineno}: unknown record {' '.join(parts)!r}")
    if J is None:
        raise FormatError("missing J record")
    if J[0] > J[1]:
        raise FormatError(f"empty interval [{J[0]}, {J[1]}]")
    return APCoverInstance(J[0], J[1], tuple(triples))


def dumps_mapcover(inst: MAPCoverInstance) -> str:
    lines = [f"PREFIX {inst.quantifiers}", "TAU " + " ".join(map(str, inst.taus))]
    for i, (mu, nu) in enumerate(inst.intervals, 1):
        lines.append(f"J {i} {mu} {nu}")
    for i, grp in enumerate(inst.groups, 1):
        lines += [f"AP {i} {t.g} {t.h} {t.e}" for t in grp]
    return "\n".join(lines) + "\n"


def loads_mapcover(text: str) -> MAPCoverInstance:
    prefix = None
    taus = None
    intervals = {}
    groups: dict[int, list] = {}
    for lineno, parts in _records(text):
        tag = parts[0]
        if tag == "PREFIX" and len(parts) == 2:
            prefix = parts[1]
        elif tag == "TAU":
            taus = _ints(parts[1:], lineno)
        elif tag == "J" and len(parts) == 4:
            i, mu, nu = _ints(parts[1:], lineno)
            intervals[i] = (mu, nu)
        elif tag == "AP" and len(parts) == 5:
            i, g, h, e = _ints(parts[1:], lineno)
            groups.setdefault(i, []).append(APTriple(g, h, e))
        else:
            raise FormatError(f"line {lineno}: unknown record {' '.join(parts)!r}")
    if prefix is None or taus is None:
        raise FormatError("missing PREFIX or TAU record")
    m = len(prefix)
    if sorted(intervals) != list(range(1, m + 1)):
        raise FormatError(f"need one J record per group 1..{m}")
    if set(groups) - set(range(1, m + 1)):
        raise FormatError("AP record references an unknown group")
    try:
        return MAPCoverInstance(
            tuple(intervals[i] for i in range(1, m + 1)),
            tuple(tuple(groups.get(i, ())) for i in range(1, m + 1)),
            tuple(taus),
            prefix,
        )
    except ValueError as exc:
        raise FormatError(str(exc)) from None
