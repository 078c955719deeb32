from fractions import Fraction
from itertools import product

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from shortpa import geometry
from shortpa.geometry import HPolytope, VPolytope

F = Fraction


def square():
    return geometry.box([(0, 1), (0, 1)])


points = st.integers(2, 4).flatmap(
    lambda d: st.lists(
        st.tuples(*(st.integers(-4, 4) for _ in range(d))), min_size=d + 1, max_size=9, unique=True
    )
)


def test_mcmullen():
    assert geometry.mcmullen_f(3, 8) == 12
    assert geometry.mcmullen_f(6, 40) == 8400
    for d in range(2, 7):
        assert geometry.mcmullen_f(d, d + 1) == d + 1
    with pytest.raises(ValueError):
        geometry.mcmullen_f(3, 3)


def test_linear_algebra():
    assert geometry.rank([(1, 2), (2, 4)]) == 1
    assert geometry.solve_square([(2, 1), (1, 3)], (3, 5)) == (F(4, 5), F(7, 5))
    ns = geometry.nullspace([(1, 1, 0)], 3)
    assert len(ns) == 2 and all(v[0] + v[1] == 0 for v in ns)
    assert geometry.affine_dim([(0, 0), (1, 1), (2, 2)]) == 1


def test_square_and_simplex():
    assert len(geometry.vertices_of(square())) == 4
    assert len(geometry.facets_of(VPolytope.from_points(2, [(0, 0), (1, 0), (0, 1), (1, 1)]))) == 4
    simplex = VPolytope.from_points(3, [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert len(geometry.facets_of(simplex)) == 4


def test_errors():
    with pytest.raises(geometry.UnboundedError):
        geometry.vertices_of(HPolytope.from_rows(2, [((-1, 0), 0), ((0, -1), 0)]))
    with pytest.raises(geometry.DegenerateError) as err:
        geometry.facets_of(VPolytope(2, ((F(0), F(0)), (F(1), F(1)), (F(2), F(2)))))
    assert err.value.affine_dim == 1
    assert geometry.vertices_of(HPolytope.from_rows(1, [((1,), 0), ((-1,), -1)])).vertices == ()


@settings(max_examples=100)
@given(points)
def test_double_description_matches_brute(pts):
    d = len(pts[0])
    assume(geometry.affine_dim(pts) == d)
    V = VPolytope.from_points(d, pts)
    H = geometry.facets_of(V)
    assert H == geometry.facets_brute(V)
    back = geometry.vertices_of(H)
    assert set(back.vertices) == set(geometry.vertices_brute(H).vertices)
    assert set(back.vertices) <= {tuple(F(c) for c in p) for p in pts}
    assert all(H.contains(p) for p in pts)


@given(points)
def test_upper_bound_theorem(pts):
    d = len(pts[0])
    assume(geometry.affine_dim(pts) == d)
    V = VPolytope.from_points(d, pts)
    n = len(geometry.vertices_of(geometry.facets_of(V)))
    if n > d:
        assert len(geometry.facets_of(V)) <= geometry.mcmullen_f(d, n)


def test_triangle_Q():
    Q = geometry.triangle_Q(5, 2, 2)
    assert set(geometry.vertices_of(Q).vertices) == {(F(4, 5), 2), (2, 2), (2, 5)}
    assert geometry.lattice_points(Q) == [(1, 2), (2, 2), (2, 3), (2, 4), (2, 5)]


def test_lift_union_segments():
    lifted = geometry.lift_union(geometry.box([(0, 1)]), geometry.box([(2, 3)]))
    assert len(lifted) == 4
    H = geometry.facets_of(lifted)
    shadow = sorted({x for x, t in geometry.lattice_points(H)})
    assert shadow == [0, 1, 2, 3]
    assert sorted({x for x, t in geometry.lattice_points(H) if t == 0}) == [0, 1]


def test_lift_union_prism():
    sq = square()
    prism = geometry.lift_union(sq, sq)
    assert len(prism) == 8 and len(geometry.facets_of(prism)) == 6


def test_lifted_disjunct_has_six_facets():
    _, H = geometry.lifted_disjunct(51, 100, 500)
    assert len(H) == 6


def test_parallelogram():
    assert geometry.parallelogram_lattice_free((1, 2), 5, 2)
    assert not geometry.parallelogram_lattice_free((2, 4), 5, 2)
    assert geometry.parallelogram_lattice_free((2, 5), 5, 2)


def test_product_interval():
    seg = VPolytope(1, ((F(0),), (F(2),)))
    sq = geometry.product_interval(seg, 0, -1, 1)
    assert set(sq.vertices) == {(a, b) for a in (-1, 1) for b in (0, 2)}


def test_system1_shape(ref_enc):
    s = geometry.build_system1(ref_enc)
    assert s.num_rows == 24
    assert (s.n_z, s.n_y, s.n_x, s.num_variables) == (1, 2, 6, 9)
    assert s.R == (1, 5)
    assert s.meta["lift_facets"] == 6
    assert s.Q == geometry.triangle_Q(5, 2, 2)


def test_system2_shape(ref_enc):
    s = geometry.build_system2(ref_enc)
    assert s.n_x == 3 and s.num_rows <= 8400
    assert s.meta["mod_vertices"] <= 12


def test_component_vertex_counts_match_brute(ref_enc):
    N = geometry.big_bound(ref_enc.M, ref_enc.p, ref_enc.q)
    for h in (geometry.mod_polytope(ref_enc.M, N), geometry.fibre_polytope(5, 2, 2)):
        assert set(geometry.vertices_of(h).vertices) == set(geometry.vertices_brute(h).vertices)


def test_polytope_format_round_trip():
    H = geometry.triangle_Q(5, 2, 2)
    V = geometry.vertices_of(H)
    assert geometry.loads_polytope(geometry.dumps_polytope(H)) == H
    assert geometry.loads_polytope(geometry.dumps_polytope(V)) == V
    with pytest.raises(geometry.GeometryFormatError):
        geometry.loads_polytope("H 2\n1 2\n")


def test_gip_format_round_trip(ref_enc):
    for s in (geometry.build_system1(ref_enc), geometry.build_system2(ref_enc)):
        text = geometry.dumps_gip(s)
        back = geometry.loads_gip(text)
        assert back == s and back.meta == s.meta
        assert geometry.dumps_gip(back) == text
