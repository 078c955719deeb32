import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shortpa import encode, presburger
from shortpa.presburger import AND, OR, Formula, ShortSentence, eval_expr, f_and, f_or, ge, le

VARS = ("a", "b", "c")


def test_eval_leaf_and_connectives():
    assert eval_expr(le({"x": 1}, 3), {"x": 3})
    eq = AND(le({"x": 1}, 3), le({"x": -1}, -3))
    assert eval_expr(eq, {"x": 3}) and not eval_expr(eq, {"x": 2})
    assert not eval_expr(OR(), {}) and eval_expr(AND(), {})
    with pytest.raises(KeyError):
        eval_expr(le({"y": 1}, 0), {"x": 0})


rows = st.builds(
    lambda cs, b: le(dict(zip(VARS, cs)), b),
    st.tuples(*(st.integers(-3, 3) for _ in VARS)),
    st.integers(-5, 5),
)
trees = st.recursive(
    rows, lambda kids: st.one_of(st.lists(kids, max_size=3).map(lambda k: AND(*k)), st.lists(kids, max_size=3).map(lambda k: OR(*k))), max_leaves=8
)
envs = st.fixed_dictionaries({v: st.integers(-4, 4) for v in VARS})


@given(trees, envs)
def test_negation_is_complement(tree, env):
    assert eval_expr(presburger.negate_tree(tree), env) == (not eval_expr(tree, env))


@given(trees)
def test_row_count_and_rename(tree):
    n = len(presburger.rows_of(tree))
    renamed = presburger.tree_map_rows(tree, lambda r: r.renamed({"a": "b"}))
    assert len(presburger.rows_of(renamed)) == n
    assert all("a" not in r.variables() for r in presburger.rows_of(renamed))


def test_ge_is_negated_le():
    r = ge({"x": 2}, 3)
    assert eval_expr(r, {"x": 2}) and not eval_expr(r, {"x": 1})


def test_bounded_trivial():
    s = ShortSentence((("E", ("z",)),), AND(ge({"z": 1}, 1), le({"z": 1}, 5)))
    assert presburger.decide_bounded(s, {"z": (0, 10)})
    assert presburger.count_bounded(s, {"z": (0, 10)}) == 5
    assert not presburger.decide_bounded(s, {"z": (6, 10)})


def test_bounded_alternation():
    # forall x exists y: y = x + 1, over x in [0, 3], y in [0, 4] and [0, 3]
    m = AND(le({"y": 1, "x": -1}, 1), ge({"y": 1, "x": -1}, 1))
    s = ShortSentence((("A", ("x",)), ("E", ("y",))), m)
    assert presburger.decide_bounded(s, {"x": (0, 3), "y": (0, 4)})
    assert not presburger.decide_bounded(s, {"x": (0, 3), "y": (0, 3)})
    assert presburger.decide_bounded(presburger.negate_sentence(s), {"x": (0, 3), "y": (0, 3)})


def _quantified(tree, tag):
    names = {v: v + tag for v in VARS}
    t = presburger.tree_map_rows(tree, lambda r: r.renamed(names))
    return Formula.qf(t).prepend("A", (names["b"], names["c"])).prepend("E", (names["a"],))


def _truth(f):
    box = {v: (-2, 2) for v in f.bound_vars()}
    return presburger.decide_bounded(ShortSentence(f.blocks, f.matrix), box)


@settings(max_examples=40)
@given(trees, trees)
def test_merging_preserves_truth(t1, t2):
    F, G = _quantified(t1, "1"), _quantified(t2, "2")
    merged_or, merged_and = f_or(F, G), f_and(F, G)
    assert len(merged_or.blocks) <= 2 and len(merged_and.blocks) <= 2
    assert _truth(merged_or) == (_truth(F) or _truth(G))
    assert _truth(merged_and) == (_truth(F) and _truth(G))


def test_format_round_trip(ref_enc):
    s = encode.build_sentence3(ref_enc)
    text = presburger.dumps_sentence(s)
    back = presburger.loads_sentence(text)
    assert back == s
    assert presburger.dumps_sentence(back) == text


def test_format_errors():
    with pytest.raises(presburger.SentenceFormatError):
        presburger.loads_sentence("SENTENCE\nE 1 z\n(and [1] <= \n")
    with pytest.raises(presburger.SentenceFormatError):
        presburger.loads_sentence("nothing here\n")


def test_certification_rejects_tampering(ref_enc):
    s = encode.build_sentence3(ref_enc)
    s.meta = dict(s.meta, M=[s.meta["M"][0] + 1])
    with pytest.raises(presburger.CertificationError):
        presburger.decide_certified(s)
    plain = ShortSentence(s.prefix, s.matrix)
    with pytest.raises(presburger.CertificationError):
        presburger.count_certified(plain)
