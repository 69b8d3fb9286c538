import dataclasses
import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qrecursive import catalog
from qrecursive import core
from qrecursive.core import (
    FormatError, InconsistentInitialValues, LinearRepresentation, MissingCoefficient,
    MissingInitialValues, NotWellFounded, OffsetTooSmall, RepresentationHasOffset,
    SequenceOracle, parse_definition, format_definition, rep_eval, rep_values, rep_vector,
    rep_from_json, rep_to_json, validate_definition,
)

STERN_TEXT = """
name = stern
q = 2
M = 1
m = 0
l = 0
u = 1
offset = 0
coefficients:
  0 0 1
  1 0 1
  1 1 1   # d(2n+1) = d(n) + d(n+1)
initial: 0 1
"""

HOMOGENEOUS = [n for n in catalog.ENTRIES if n != "digit_sum_inhomogeneous"]


def test_parse_stern_text():
    d = validate_definition(parse_definition(STERN_TEXT))
    assert d.coefficients == {(0, 0): 1, (1, 0): 1, (1, 1): 1}
    assert [SequenceOracle(d)(n) for n in range(10)] == [0, 1, 1, 2, 1, 3, 2, 3, 1, 4]


@pytest.mark.parametrize("name", HOMOGENEOUS)
def test_format_parse_round_trip(name):
    d = catalog.get_entry(name).definition()
    back = validate_definition(parse_definition(format_definition(d)))
    assert back == d


def test_decimal_rejected():
    with pytest.raises(FormatError):
        parse_definition(STERN_TEXT.replace("1 1 1", "1 1 0.5"))


def test_missing_field():
    with pytest.raises(FormatError):
        parse_definition("q = 2\nM = 1\n")


def test_offset_too_small():
    # the artificial example with n0 = 0 would need x(-1)
    with pytest.raises(OffsetTooSmall):
        validate_definition(catalog.artificial_general_definition(n0=0))


def test_missing_coefficient():
    d = catalog.stern_definition()
    coeffs = {k: v for k, v in d.coefficients.items() if k[0] != 1}
    with pytest.raises(MissingCoefficient):
        validate_definition(dataclasses.replace(d, coefficients=coeffs))


def test_missing_initial_values():
    d = catalog.pascal_z_definition()
    with pytest.raises(MissingInitialValues):
        validate_definition(dataclasses.replace(d, initial=d.initial[:3]))


def test_inconsistent_initial_values():
    d = catalog.unbordered_definition()
    init = list(d.initial)
    init[12] = Fraction(11)
    with pytest.raises(InconsistentInitialValues):
        validate_definition(dataclasses.replace(d, initial=tuple(init)))


def test_not_well_founded():
    d = core.QRecursiveDefinition(2, 1, 0, 0, 2, 0, {(0, 2): Fraction(1), (1, 0): Fraction(1)},
                                  (Fraction(0), Fraction(1)))
    with pytest.raises(NotWellFounded):
        validate_definition(d)


def test_oracle_values_and_summatory():
    x = SequenceOracle(catalog.stern_definition())
    assert x.values(15) == [0, 1, 1, 2, 1, 3, 2, 3, 1, 4, 3, 5, 2, 5, 3, 4]
    assert x(-3) == 0
    assert x.summatory(16) == 40
    p = SequenceOracle(catalog.odd_pascal_definition())
    assert p.values(10) == [0, 1, 3, 5, 9, 11, 15, 19, 27, 29, 33]


def test_rep_eval_and_offset_error():
    rep = catalog.STERN_MINIMAL
    assert [rep_eval(rep, n) for n in range(16)] == SequenceOracle(catalog.stern_definition()).values(15)
    shifted = dataclasses.replace(rep, validity_offset=1)
    with pytest.raises(RepresentationHasOffset):
        rep_eval(shifted, 3)
    with pytest.raises(RepresentationHasOffset):
        rep_values(shifted, 3)


def test_json_round_trip():
    from qrecursive.builder import build
    d = catalog.unbordered_definition()
    rep = build(d, special=True)
    text = json.dumps(rep_to_json(rep, validate_definition(d)))
    back, d2 = rep_from_json(json.loads(text))
    assert back.matrices == rep.matrices and back.v0 == rep.v0 and back.labels == rep.labels
    assert d2 == validate_definition(d)


def test_json_malformed():
    with pytest.raises(FormatError):
        rep_from_json({"q": 2})


def reps():
    def make(args):
        q, D = args
        ints = st.integers(-2, 2)
        mat = st.lists(st.lists(ints, min_size=D, max_size=D), min_size=D, max_size=D)
        vec = st.lists(ints, min_size=D, max_size=D)
        return st.builds(lambda ms, v, s: LinearRepresentation(q, ms, v, s),
                         st.lists(mat, min_size=q, max_size=q), vec, vec)
    return st.tuples(st.integers(2, 3), st.integers(1, 3)).flatmap(make)


@settings(max_examples=50, deadline=None)
@given(reps(), st.integers(0, 200))
def test_rep_vector_recursion(rep, n):
    for r in range(rep.q):
        a = rep.matrices[r]
        v = rep_vector(rep, n)
        w = rep_vector(rep, rep.q * n + r)
        if n == 0 and r == 0:
            continue
        assert w == tuple(sum(a[i][j] * v[j] for j in range(rep.dim)) for i in range(rep.dim))


@settings(max_examples=30, deadline=None)
@given(reps())
def test_rep_values_matches_rep_eval(rep):
    assert rep_values(rep, 60) == [rep_eval(rep, n) for n in range(61)]


def naive_eval(d, n):
    """Unmemoized top-down recursion."""
    if n < 0:
        return 0
    if n < len(d.initial):
        return d.initial[n]
    a, s = divmod(n, d.qM)
    return sum(c * naive_eval(d, d.qm * a + k) for (s2, k), c in d.coefficients.items() if s2 == s)


@pytest.mark.parametrize("name,step", [("stern", 7), ("pascal_z", 61), ("unbordered", 97),
                                       ("artificial_general", 89)])
def test_memo_transparency(name, step):
    d = catalog.get_entry(name).definition()
    x = SequenceOracle(d)
    ns = range(0, 10 ** 4 + 1, step)
    assert all(naive_eval(d, n) == x(n) for n in ns)
    fresh = [core.oracle_eval(d, n) for n in (0, 17, 4097, 10 ** 4)]
    assert fresh == [x(n) for n in (0, 17, 4097, 10 ** 4)]


def test_pascal_two_dim_representation():
    x = SequenceOracle(catalog.pascal_z_definition())
    assert rep_eval(catalog.PASCAL_Z_TWO_DIM, 1000) == x(1000)
    assert rep_values(catalog.PASCAL_Z_TWO_DIM, 2000) == x.values(2000)


def test_oracle_summatory():
    d = catalog.stern_definition()
    assert core.oracle_summatory(d, 16) == 40
    assert core.oracle_summatory(d, 0) == 0
