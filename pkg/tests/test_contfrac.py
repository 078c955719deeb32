from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shortpa.contfrac import (
    ContinuedFraction,
    Point,
    chain_points,
    chain_residues,
    chain_vertex_set,
    check_chain_properties,
    convergents,
    eval_cfrac,
    to_odd_cfrac,
)
from shortpa.kpt import fibonacci


def cf(*terms):
    return ContinuedFraction.from_terms(terms)


# kept small: the envelope check scans the chain's bounding box
odd_terms = (
    st.integers(0, 3)
    .flatmap(
        lambda k: st.tuples(
            st.integers(2, 4), st.lists(st.integers(1, 3), min_size=2 * k, max_size=2 * k)
        )
    )
    .map(lambda t: ContinuedFraction.from_terms([t[0]] + t[1]))
    .filter(lambda c: convergents(c).p * convergents(c).q <= 20_000)
)


def test_convergents_small():
    ch = convergents(cf(2, 1, 1))
    assert ch.C == ((1, 0), (1, 2), (2, 5))
    assert ch.D == ((0, 1), (1, 3))
    ch = convergents(cf(1))
    assert ch.C == ((1, 0), (1, 1)) and ch.D == ((0, 1),)


@pytest.mark.parametrize("s", range(1, 7))
def test_convergents_fibonacci(s):
    ch = convergents(cf(2, *([1] * (2 * s))))
    for i in range(1, s + 2):
        assert ch.C[i] == (fibonacci(2 * i - 1), fibonacci(2 * i + 1))


def test_eval_cfrac():
    assert eval_cfrac(cf(2, 1, 1)) == Fraction(5, 2)
    assert eval_cfrac(cf(3)) == 3
    assert eval_cfrac(cf(2, 1, 1, 1, 1)) == Fraction(13, 5)


def test_to_odd_cfrac():
    assert to_odd_cfrac(Fraction(5, 2)).terms() == [2, 1, 1]
    assert to_odd_cfrac(3).terms() == [3]
    assert to_odd_cfrac(Fraction(7, 3)).terms() == [2, 2, 1]
    with pytest.raises(ValueError):
        to_odd_cfrac(Fraction(1, 2))


def test_bad_terms():
    with pytest.raises(ValueError):
        cf(2, 1)
    with pytest.raises(ValueError):
        ContinuedFraction((2, 0), (1,))


@given(st.integers(2, 400), st.integers(1, 400))
def test_odd_cfrac_round_trip(p, q):
    alpha = Fraction(p, q)
    if alpha <= 1:
        return
    c = to_odd_cfrac(alpha)
    assert len(c.terms()) % 2 == 1
    assert eval_cfrac(c) == alpha
    ch = convergents(c)
    assert (ch.q, ch.p) == (alpha.denominator, alpha.numerator)


def test_chain_points():
    ch = convergents(cf(2, 1, 1))
    assert chain_points(ch, 2) == [(1, 2), (2, 5)]
    assert chain_points(ch, 0) == [(1, 0), (1, 1), (1, 2), (2, 5)]
    assert chain_points(convergents(cf(2, 1, 1, 1, 1)), 2) == [(1, 2), (2, 5), (5, 13)]
    assert all(isinstance(p, Point) for p in chain_points(ch))


def test_chain_residues():
    assert chain_residues(convergents(cf(2, 1, 1)), 2, 51) == {2, 5}


@settings(max_examples=40)
@given(odd_terms)
def test_chain_properties_hold(c):
    rep = check_chain_properties(convergents(c))
    assert all(rep.values()), rep


def test_chain_properties_examples():
    assert all(check_chain_properties(convergents(cf(2, 1, 1))).values())
    assert all(check_chain_properties(convergents(cf(2, 1, 1, 1, 1))).values())


def test_corrupted_chain_fails_envelope():
    ch = convergents(cf(2, 1, 1, 1, 1))
    C = list(ch.C)
    C[1] = Point(C[1].y1, C[1].y2 + 1)
    bad = type(ch)(tuple(C), ch.D, ch.cf)
    rep = check_chain_properties(bad)
    assert not all(rep.values())


def test_vertex_set():
    Cs, Ds = chain_vertex_set(convergents(cf(2, 1, 1)))
    assert (1, 2) in Cs and (1, 3) in Ds
