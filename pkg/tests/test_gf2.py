import numpy as np
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from surfport import gf2
from surfport.lattice import build_layout

mats = st.tuples(st.integers(1, 8), st.integers(1, 10)).flatmap(
    lambda s: arrays(np.uint8, s, elements=st.integers(0, 1)))


@settings(max_examples=100, deadline=None)
@given(mats)
def test_row_reduce_transform(a):
    red, piv, t = gf2.row_reduce(a)
    assert np.array_equal(t.astype(int) @ a.astype(int) % 2, red)
    assert len(piv) == gf2.rank(a)


@settings(max_examples=100, deadline=None)
@given(mats)
def test_nullspace(a):
    ns = gf2.nullspace(a)
    assert ns.shape[0] == a.shape[1] - gf2.rank(a)
    assert not np.any(a.astype(int) @ ns.T.astype(int) % 2)
    if ns.shape[0]:
        assert gf2.rank(ns) == ns.shape[0]


@settings(max_examples=100, deadline=None)
@given(mats, st.data())
def test_solve_consistent(a, data):
    x0 = data.draw(arrays(np.uint8, a.shape[1], elements=st.integers(0, 1)))
    b = a.astype(int) @ x0 % 2
    x = gf2.solve(a, b)
    assert x is not None and np.array_equal(a.astype(int) @ x % 2, b)


def test_solve_inconsistent():
    a = np.array([[1, 1], [1, 1]], dtype=np.uint8)
    assert gf2.solve(a, np.array([1, 0])) is None


def test_right_inverse_of_checks():
    for d in range(2, 8):
        for kind in "XZ":
            h = build_layout(d).check_matrix(kind)
            r = gf2.right_inverse(h)
            assert np.array_equal(h.astype(int) @ r.astype(int) % 2, np.eye(h.shape[0], dtype=int))
