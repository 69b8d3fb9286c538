from fractions import Fraction

import numpy as np
from hypothesis import given, settings, strategies as st

from qrecursive import linalg as la
from qrecursive.spectral import poly_divmod

small = st.integers(-5, 5)


def square(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)


def test_rank_and_nullspace():
    a = la.matrix([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    assert la.rank(a) == 2
    ns = la.nullspace(a)
    assert len(ns) == 1
    assert all(x == 0 for x in la.matvec(a, ns[0]))


def test_inverse_exact():
    a = la.matrix([[2, 1], [1, 1]])
    assert la.matmul(a, la.inverse(a)) == la.identity(2)
    assert la.inverse([[3]]) == ((Fraction(1, 3),),)


def test_char_and_min_poly():
    assert la.char_poly([[1, 1], [0, 1]]) == [1, -2, 1]
    assert la.min_poly([[1, 1], [0, 1]]) == [1, -2, 1]
    assert la.min_poly([[2, 0], [0, 2]]) == [1, -2]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4).flatmap(square))
def test_inverse_property(rows):
    a = la.matrix(rows)
    if la.rank(a) < len(a):
        return
    assert la.matmul(la.inverse(a), a) == la.identity(len(a))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4).flatmap(square))
def test_cayley_hamilton_and_min_poly_divides(rows):
    a = la.matrix(rows)
    n = len(a)
    cp, mp = la.char_poly(a), la.min_poly(a)
    assert len(cp) == n + 1
    for p in (cp, mp):
        acc = la.zeros(n, n)
        for c in p:
            acc = la.matadd(la.matmul(acc, a), la.matscale(c, la.identity(n)))
        assert all(x == 0 for row in acc for x in row)
    assert poly_divmod(cp, mp)[1] == []
    ev = np.sort_complex(np.linalg.eigvals(np.array(rows, dtype=float)))
    roots = np.sort_complex(np.roots([float(c) for c in cp]).astype(complex))
    assert np.allclose(ev, roots, atol=1e-4)
