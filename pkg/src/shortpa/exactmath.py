"""Exact integer/rational helpers: modular inverses, CRT, small primes."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt, prod

Rat = Fraction


class ScaleError(ValueError):
    """Raised when a brute-force oracle is asked to scan beyond desk scale."""


def mod_inverse(a: int, m: int) -> int:
    """Return x in [1, m] with a*x = 1 (mod m)."""
    if m < 2:
        raise ValueError(f"modulus must be >= 2, got {m}")
    if gcd(a, m) != 1:
        raise ValueError(f"{a} is not invertible modulo {m}")
    x = pow(a, -1, m)
    return x if x != 0 else m


def solve_linear_mod(a: int, c: int, m: int) -> int:
    """Smallest x in [1, m] with a*x = c (mod m); a must be a unit."""
    x = (mod_inverse(a, m) * c) % m
    return x if x != 0 else m


def crt_solve(residues: list[tuple[int, int]]) -> int:
    """Unique e in [0, prod(moduli)) matching every (remainder, modulus)."""
    e, n = 0, 1
    for r, m in residues:
        if m < 1:
            raise ValueError(f"bad modulus {m}")
        if not 0 <= r < m:
            raise ValueError(f"remainder {r} outside [0, {m})")
        if gcd(n, m) != 1:
            raise ValueError(f"moduli not pairwise coprime (modulus {m})")
        # e + n*k = r (mod m)
        k = ((r - e) * pow(n, -1, m)) % m if m > 1 else 0
        e += n * k
        n *= m
    return e


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def first_primes(count: int, offset: int = 0) -> list[int]:
    """The primes p_{offset+1}, ..., p_{offset+count} in increasing order.

    offset=1 skips 2, giving 3, 5, 7, ...
    """
    if count < 0 or offset < 0:
        raise ValueError("count and offset must be non-negative")
    out: list[int] = []
    n, seen = 1, 0
    while len(out) < count:
        n += 1
        if is_prime(n):
            seen += 1
            if seen > offset:
                out.append(n)
    return out


def ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def product(values) -> int:
    return prod(values, start=1)


def clear_denominators(values) -> list[int]:
    """Scale a rational vector by the lcm of its denominators (sign kept)."""
    fr = [Fraction(v) for v in values]
    lcm = 1
    for f in fr:
        lcm = lcm * f.denominator // gcd(lcm, f.denominator)
    return [int(f * lcm) for f in fr]


def primitive(values) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries."""
    g = 0
    for v in values:
        g = gcd(g, v)
    if g <= 1:
        return tuple(values)
    return tuple(v // g for v in values)
