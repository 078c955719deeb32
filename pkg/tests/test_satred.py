import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from shortpa import apcover, satred
from shortpa.satred import Cnf3, QbfInstance


@st.composite
def cnfs(draw, max_vars=4, max_clauses=6):
    n = draw(st.integers(1, max_vars))
    lit = st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v]))
    clauses = draw(st.lists(st.tuples(lit, lit, lit), max_size=max_clauses))
    return Cnf3(n, tuple(clauses))


def test_count_sat_examples():
    assert satred.count_sat(Cnf3(1, ((1, 1, 1),))) == 1
    assert satred.count_sat(Cnf3(2, ((1, 2, 2), (-1, 2, 2)))) == 2
    assert satred.count_sat(Cnf3(3, ())) == 8


def test_reduction_examples():
    red = satred.reduce_3sat_to_apcover(Cnf3(1, ((1, 1, 1),)))
    assert (red.instance.mu, red.instance.nu) == (0, 1)
    assert apcover.uncovered(red.instance) == [1]
    assert red.decode(1) == (True,)
    red = satred.reduce_3sat_to_apcover(Cnf3(2, ((1, 2, 2), (-1, 2, 2))))
    assert apcover.count_apcover(red.instance) == 2
    unsat = satred.reduce_3sat_to_apcover(Cnf3(1, ((1, 1, 1), (-1, -1, -1))))
    assert apcover.count_apcover(unsat.instance) == 0


@given(cnfs(), st.booleans())
def test_reduction_is_parsimonious(f, trick):
    red = satred.reduce_3sat_to_apcover(f, trick)
    free = apcover.uncovered(red.instance)
    assert len(free) == satred.count_sat(f)
    # every uncovered point decodes to a satisfying assignment, injectively
    decoded = {red.decode(z) for z in free}
    assert len(decoded) == len(free)
    assert all(f.satisfied_by(a) for a in decoded)
    for a in decoded:
        assert red.encode(a) in free


@given(cnfs(max_vars=3))
def test_parity_trick_uncovered_are_odd(f):
    red = satred.reduce_3sat_to_apcover(f, parity_trick=True)
    assert all(z % 2 == 1 for z in apcover.uncovered(red.instance))


def test_too_many_variables():
    with pytest.raises(satred.ScaleError):
        satred.reduce_3sat_to_apcover(Cnf3(satred.MAX_VARS + 1, ()))


def _qbf(prefix, clauses, n):
    return QbfInstance(prefix, Cnf3(n, clauses))


def test_qbf_examples():
    # forall v1 exists u1; variable 1 is v1, variable 2 is u1
    good = _qbf((("A", (1,)), ("E", (2,))), ((2, 1, 1), (-2, -1, -1)), 2)
    bad = _qbf((("A", (1,)), ("E", (2,))), ((2, 2, 2), (-2, -2, -2)), 2)
    assert satred.decide_qbf(good)
    assert not satred.decide_qbf(bad)
    assert apcover.decide_mapcover(satred.reduce_qbf_to_mapcover(good))
    assert not apcover.decide_mapcover(satred.reduce_qbf_to_mapcover(bad))


def test_qbf_validation():
    with pytest.raises(ValueError):
        _qbf((("E", (1,)), ("A", (2,))), (), 2)
    with pytest.raises(ValueError):
        _qbf((("E", (1,)),), (), 2)


def test_qbf_reduction_random():
    rng = random.Random(7)
    for _ in range(60):
        n = rng.randint(2, 4)
        f = satred.random_qbf(rng, n, rng.randint(1, min(n, 3)), rng.randint(1, 6))
        assert apcover.decide_mapcover(satred.reduce_qbf_to_mapcover(f)) == satred.decide_qbf(f)


def test_single_block_matches_sat_reduction():
    rng = random.Random(3)
    for _ in range(100):
        f = satred.random_cnf(rng, rng.randint(1, 3), rng.randint(0, 6))
        q = QbfInstance((("E", tuple(range(1, f.num_vars + 1))),), f)
        inst = satred.reduce_qbf_to_mapcover(q)
        red = satred.reduce_3sat_to_apcover(f)
        assert apcover.count_mapcover_witnesses(inst) == apcover.count_apcover(red.instance)


@given(cnfs())
def test_dimacs_round_trip(f):
    assert satred.loads_dimacs(satred.dumps_dimacs(f)) == f


def test_dimacs_parsing():
    f = satred.loads_dimacs("c comment\np cnf 3 2\n1 -2 0\n3 0\n")
    assert f.clauses == ((1, -2, -2), (3, 3, 3))
    with pytest.raises(satred.DimacsError, match="line 2"):
        satred.loads_dimacs("p cnf 2 1\n1 5 0\n")
    with pytest.raises(satred.DimacsError):
        satred.loads_dimacs("1 2 0\n")
    with pytest.raises(satred.DimacsError):
        satred.loads_dimacs("p cnf 2 1\n1 2\n")


def test_qdimacs_round_trip():
    rng = random.Random(11)
    for _ in range(20):
        f = satred.random_qbf(rng, 4, 2, 3)
        assert satred.loads_qdimacs(satred.dumps_qdimacs(f)) == f


def test_qdimacs_free_variables_are_outer_existential():
    f = satred.loads_qdimacs("p cnf 3 1\na 2 0\ne 3 0\n1 2 3 0\n")
    assert f.blocks == (("E", (1,)), ("A", (2,)), ("E", (3,)))
