import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shortpa import _pykernels, kernels

ck = pytest.importorskip("shortpa._ckernels")


def test_backend_selection():
    assert "python" in kernels.available_backends()
    assert kernels.backend() == "cython"
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")


@given(st.integers(1, 60), st.integers(1, 60), st.integers(0, 70), st.integers(1, 70))
def test_parallelogram(p, q, y1, y2):
    assert ck.parallelogram_empty(y1, y2, p, q) == _pykernels.parallelogram_empty(y1, y2, p, q)


@given(st.integers(2, 300), st.integers(1, 300), st.integers(1, 4))
def test_lattice_free_points(p, q, g1):
    got = [tuple(t) for t in ck.lattice_free_points(p, q, g1)]
    assert got == _pykernels.lattice_free_points(p, q, g1)
    assert [tuple(t) for t in ck.lattice_free_points_scan(p, q, g1)] == got


triples = st.lists(st.tuples(st.integers(-5, 30), st.integers(0, 8), st.integers(1, 7)), max_size=5)


@given(st.integers(-5, 10), st.integers(0, 30), triples)
def test_uncovered_mask(mu, n, ts):
    assert bytes(ck.uncovered_mask(mu, mu + n, ts)) == bytes(
        _pykernels.uncovered_mask(mu, mu + n, ts)
    )


@given(st.integers(1, 5), st.integers(1, 8), st.integers(1, 8), st.data())
def test_rhs_feasibility(rows, nx, nr, data):
    ints = st.integers(-4, 4)
    AX = np.array(data.draw(st.lists(ints, min_size=rows * nx, max_size=rows * nx)), dtype=np.int64)
    RHS = np.array(data.draw(st.lists(ints, min_size=rows * nr, max_size=rows * nr)), dtype=np.int64)
    AX, RHS = AX.reshape(rows, nx), RHS.reshape(rows, nr)
    assert bool(ck.all_rhs_feasible(AX, RHS)) == _pykernels.all_rhs_feasible(AX, RHS)
    assert list(ck.feasible_columns(AX, RHS)) == list(_pykernels.feasible_columns(AX, RHS))


def test_big_integers_take_the_python_path():
    big = 2**70
    assert kernels.parallelogram_empty(1, 2, big + 1, big // 2) == _pykernels.parallelogram_empty(
        1, 2, big + 1, big // 2
    )
