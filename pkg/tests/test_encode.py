import random
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from shortpa import apcover, encode, presburger, satred
from shortpa.apcover import APCoverInstance, APTriple, MAPCoverInstance
from shortpa.contfrac import ContinuedFraction, convergents

from conftest import COVERED, REFERENCE


@st.composite
def normalized(draw, max_k=3):
    k = draw(st.integers(0, max_k))
    ts = tuple(
        APTriple(draw(st.integers(2, 9)), draw(st.integers(1, 9)), draw(st.integers(1, 9)))
        for _ in range(k)
    )
    mu = draw(st.integers(1, 9))
    return APCoverInstance(mu, mu + draw(st.integers(0, 9)), ts)


def test_compute_M():
    assert encode.compute_M(APCoverInstance(1, 4, (APTriple(2, 1, 1),))) == 25
    assert encode.compute_M(REFERENCE) == 51
    assert encode.compute_M(APCoverInstance(1, 1)) == 2


def test_reference_encoding(ref_enc):
    assert ref_enc.M == 51
    assert ref_enc.cfrac.terms() == [2, 1, 1]
    ch = ref_enc.chains
    assert ch.C[1] == (1, 2) and ch.D[1] == (1, 3) and ch.C[2] == (2, 5)
    assert ref_enc.residues() == {2, 5}
    assert all(encode.check_conditions(ref_enc).values())


def test_single_progression_step():
    enc = encode.encode_instance(APCoverInstance(1, 11, (APTriple(3, 2, 4),)))
    assert enc.M == 364
    assert enc.cfrac.b[0] == 1
    assert enc.residues() == {3, 7, 11}


def test_needs_normalized_input():
    with pytest.raises(ValueError):
        encode.build_encoding(APCoverInstance(0, 3, (APTriple(1, 1, 1),)))


def test_empty_cover_is_vacuous():
    enc = encode.build_encoding(APCoverInstance(1, 5))
    assert all(encode.check_conditions(enc).values())
    assert not enc.residues() & set(range(1, 6))


@given(normalized())
def test_conditions_hold(inst):
    enc = encode.build_encoding(inst)
    rep = encode.check_conditions(enc)
    assert all(rep.values()), rep


@given(normalized())
def test_delta_is_the_cover(inst):
    enc = encode.build_encoding(inst)
    covered = {z for z in range(inst.mu, inst.nu + 1) if apcover.in_union(z, inst.triples)}
    in_delta = {z for z in range(inst.mu, inst.nu + 1) if z % enc.M in enc.residues()}
    assert covered == in_delta


def test_corrupted_start_fails(ref_enc):
    cf = ref_enc.cfrac
    bad_cf = ContinuedFraction(cf.a, (cf.b[0] + 1,) + cf.b[1:])
    bad = replace(ref_enc, cfrac=bad_cf, chains=convergents(bad_cf))
    rep = encode.check_conditions(bad)
    assert not (rep["4_start_g"] and rep["6_segments"])


def test_sentence3(ref_enc, covered_enc):
    s = encode.build_sentence3(ref_enc)
    assert s.quantifiers() == "EAE" and s.shape() == (1, 2, 2)
    assert (s.num_variables, s.num_inequalities) == (5, 10)
    assert presburger.decide_certified(s)
    assert presburger.count_certified(s) == 3
    assert [z for z, ok in presburger._certified_outer_values(s) if ok] == [1, 3, 4]
    assert not presburger.decide_certified(encode.build_sentence3(covered_enc))


def test_sentence3_bounded_agrees(ref_enc, covered_enc):
    for enc in (ref_enc, covered_enc):
        s = encode.build_sentence3(enc)
        box = encode.sentence3_box(enc)
        assert presburger.decide_bounded(s, box) == presburger.decide_certified(s)
        assert presburger.count_bounded(s, box) == presburger.count_certified(s)
    assert encode.sentence3_box(ref_enc) == {
        "z": (1, 5), "y1": (0, 2), "y2": (0, 5), "x1": (-1, 2), "x2": (0, 5)
    }


def test_sentence3_bounded_on_tiny(tiny):
    for enc in tiny[:12]:
        s = encode.build_sentence3(enc)
        assert presburger.count_bounded(s, encode.sentence3_box(enc)) == apcover.count_apcover(
            enc.source
        )


AE = MAPCoverInstance(((1, 5), (0, 2)), ((APTriple(2, 1, 3),), (APTriple(3, 1, 4),)), (1, 1), "AE")


def test_merged_sentence_small():
    s = encode.build_sentence_m(AE)
    assert s.quantifiers() == "AEAE"
    assert (s.num_variables, s.num_inequalities) == (9, 20)
    box = encode.sentence_m_box(AE)
    assert presburger.decide_certified(s) is True
    assert presburger.decide_bounded(s, box) is True
    assert apcover.decide_mapcover(AE)
    no = replace(AE, intervals=((1, 5), (0, 0)))
    s = encode.build_sentence_m(no)
    assert not apcover.decide_mapcover(no)
    assert not presburger.decide_certified(s)
    assert not presburger.decide_bounded(s, encode.sentence_m_box(no))


def test_merged_sentence_from_qbf():
    good = satred.QbfInstance((("A", (1,)), ("E", (2,))), satred.Cnf3(2, ((2, 1, 1), (-2, -1, -1))))
    bad = satred.QbfInstance((("A", (1,)), ("E", (2,))), satred.Cnf3(2, ((2, 2, 2), (-2, -2, -2))))
    for f, want in ((good, True), (bad, False)):
        s = encode.build_sentence_m(satred.reduce_qbf_to_mapcover(f))
        assert (s.num_variables, s.num_inequalities) == (9, 20)
        assert presburger.decide_certified(s) == want


def test_three_groups_merge():
    rng = random.Random(5)
    f = satred.random_qbf(rng, 3, 3, 3)
    s = encode.build_sentence_m(satred.reduce_qbf_to_mapcover(f))
    assert s.quantifiers() == "EAEAE"[-len(s.prefix):]
    assert presburger.decide_certified(s) == satred.decide_qbf(f)
