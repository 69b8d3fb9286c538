import itertools

import pytest
from hypothesis import given, settings, strategies as st

from qrecursive import catalog
from qrecursive import linalg as la
from qrecursive.core import LinearRepresentation, rep_values
from qrecursive.minimizer import minimize

from conftest import corrected


def words(q, L):
    for k in range(L + 1):
        yield from itertools.product(range(q), repeat=k)


def hankel_rank(rep, L):
    """Rank of (sel A_u A_w v0) over words u, w of length <= L."""
    rows = []
    for u in words(rep.q, L):
        left = rep.selection
        for r in u:
            left = la.vecmat(left, rep.matrices[r])
        rows.append(left)
    cols = []
    for w in words(rep.q, L):
        right = rep.v0
        for r in reversed(w):
            right = la.matvec(rep.matrices[r], right)
        cols.append(right)
    # rank(L R) = rank(B_L B_R^T) for bases of the row spaces of L and R
    bl = [r for r in la.rref(rows)[0] if any(r)]
    br = [c for c in la.rref(cols)[0] if any(c)]
    return la.rank([[la.dot(a, b) for b in br] for a in bl])


@pytest.mark.parametrize("name,dim", [("stern", 2), ("pascal_z", 2), ("unbordered", 8),
                                      ("artificial_general", 13), ("artificial_special", 6)])
def test_minimal_dimension(name, dim):
    rep = corrected(name)
    small, report = minimize(rep)
    assert small.dim == dim == report.output_dim
    assert rep_values(small, 2000) == rep_values(rep, 2000)
    assert hankel_rank(rep, 9) == dim


def test_unbordered_from_ten():
    rep = corrected("unbordered")
    assert rep.dim == 10
    assert minimize(rep)[0].dim == 8


def test_idempotent():
    small = minimize(corrected("unbordered"))[0]
    again = minimize(small)[0]
    assert again.dim == small.dim
    assert rep_values(again, 500) == rep_values(small, 500)


def test_stern_minimal_labels_are_sequences():
    small = minimize(corrected("stern"))[0]
    assert small.dim == 2
    assert catalog.STERN_MINIMAL.dim == 2


def test_offset_rejected():
    from qrecursive.builder import build_general
    with pytest.raises(ValueError):
        minimize(build_general(catalog.artificial_general_definition()))


def reps():
    def make(D):
        ints = st.integers(-2, 2)
        mat = st.lists(st.lists(ints, min_size=D, max_size=D), min_size=D, max_size=D)
        vec = st.lists(ints, min_size=D, max_size=D)
        return st.builds(lambda ms, v, s: LinearRepresentation(2, ms, v, s),
                         st.lists(mat, min_size=2, max_size=2), vec, vec)
    return st.integers(1, 4).flatmap(make)


@settings(max_examples=40, deadline=None)
@given(reps())
def test_minimize_property(rep):
    small, _ = minimize(rep)
    assert small.dim <= rep.dim
    assert rep_values(small, 300) == rep_values(rep, 300)
    assert small.dim == hankel_rank(rep, 3)
