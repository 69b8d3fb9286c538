"""Worked examples and first-principles oracles.

The oracles here deliberately avoid the recurrences: they count
hyperbinary representations, nonzero binomial coefficients of binary
words, and unbordered factors of the Thue-Morse word directly.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import re

import numpy as np

from . import linalg as la
from .core import (
    LinearRepresentation, QRecursiveDefinition, QRecursiveError, SequenceOracle,
    validate_definition,
)
from .builder import identity


class PrefixInsufficient(QRecursiveError):
    pass


class UnknownEntry(QRecursiveError):
    pass


# ---------------------------------------------------------------- oracles

def stern_hyperbinary(n):
    """Number of ways to write n as a sum of powers of 2, each used at most twice."""
    if n < 0:
        return 0

    @lru_cache(maxsize=None)
    def count(rest, p):
        # powers >= p only; everything left must be a multiple of p
        if rest == 0:
            return 1
        if p > rest:
            return 0
        total = 0
        for c in (0, 1, 2):
            left = rest - c * p
            if left >= 0 and left % (2 * p) == 0:
                total += count(left, 2 * p)
        return total

    return count(n, 1)


def stern_oracle(n):
    """Stern's diatomic sequence via d(n + 1) = hyperbinary(n)."""
    return 0 if n <= 0 else stern_hyperbinary(n - 1)


def word_binomial(u, v):
    """Number of occurrences of v as a scattered subword of u."""
    ways = [1] + [0] * len(v)
    for a in u:
        for j in range(len(v), 0, -1):
            if v[j - 1] == a:
                ways[j] += ways[j - 1]
    return ways[len(v)]


def binary(n):
    return "" if n == 0 else format(n, "b")


def pascal_row_nonzero(n):
    """#{k : binom((n)_2, (k)_2) != 0}, by scanning all k <= n."""
    w = binary(n)
    return sum(1 for k in range(n + 1) if word_binomial(w, binary(k)))


def _distinct_subsequences(w):
    """Number of distinct subsequences of w, the empty one included."""
    total = 1
    last = {}
    for a in w:
        prev = total
        total = 2 * total - last.get(a, 0)
        last[a] = prev
    return total


def pascal_z_oracle(n):
    """Nonzero entries in row n of the binary Pascal triangle.

    (k)_2 has a nonzero binomial with (n)_2 iff it is a scattered subword;
    such subwords start with 1, so they are 1 followed by any subsequence of
    what comes after the leading 1 of (n)_2.  Add one for k = 0.
    """
    if n == 0:
        return 1
    return 1 + _distinct_subsequences(binary(n)[1:])


def odd_pascal_oracle(n):
    """Number of odd entries in the first n rows of Pascal's triangle."""
    return sum(2 ** bin(k).count("1") for k in range(n))


def largest_power_of_two(n):
    return 0 if n <= 0 else 1 << (n.bit_length() - 1)


def binary_sum_of_digits(n):
    return bin(n).count("1")


def thue_morse(length):
    idx = np.arange(length, dtype=np.int64)
    bits = np.zeros(length, dtype=np.int64)
    while idx.any():
        bits ^= idx & 1
        idx >>= 1
    return bits


_MODS = (2147483647, 2147483629)
_BASES = (911382323, 972663749)


class _WindowHash:
    """Two polynomial hashes modulo primes (2^k moduli collide on Thue-Morse)."""

    def __init__(self, bits):
        n = len(bits)
        self.tables = []
        for p, b in zip(_MODS, _BASES):
            h = np.zeros(n + 1, dtype=np.int64)
            pw = np.ones(n + 1, dtype=np.int64)
            acc, pk = 0, 1
            for i in range(n):  # plain loop once per prefix; values stay below 2^31
                acc = (acc * b + int(bits[i]) + 1) % p
                pk = pk * b % p
                h[i + 1] = acc
                pw[i + 1] = pk
            self.tables.append((p, h, pw))

    def __call__(self, start, length):
        start = np.asarray(start)
        keys = []
        for p, h, pw in self.tables:
            keys.append((h[start + length] - h[start] * pw[length] % p) % p)
        return keys[0] * (1 << 31) + keys[1]


def _unbordered_count(bits, hasher, n):
    if n == 0:
        return 1
    starts = np.arange(len(bits) - n + 1)
    _, first = np.unique(hasher(starts, n), return_index=True)
    alive = starts[first]
    for b in range(1, n // 2 + 1):
        if not len(alive):
            break
        same = hasher(alive, b) == hasher(alive + n - b, b)
        alive = alive[~same]
    return len(alive)


def _distinct_count(hasher, length, n):
    return len(np.unique(hasher(np.arange(length - n + 1), n)))


def tm_unbordered_oracle(n, prefix_len=None, max_prefix=1 << 24):
    """Number of distinct unbordered factors of length n of the Thue-Morse word.

    Counts factors of a prefix, doubling the prefix until the count is stable.
    A word is bordered iff it has a border of length at most half its length,
    so only those are compared (by hash).
    """
    return tm_unbordered_counts([n], prefix_len, max_prefix)[n]


def tm_unbordered_counts(ns, prefix_len=None, max_prefix=1 << 24):
    """f(n) for every n in ns, sharing one prefix of the Thue-Morse word."""
    ns = list(ns)
    top = max(max(ns), 1)
    if prefix_len is None:
        prefix_len = 1 << max(8 * top - 1, 1).bit_length()
    elif prefix_len < 8 * top:
        raise PrefixInsufficient("prefix of length %d is too short for n = %d" % (prefix_len, top))
    # every factor of length top must already occur in the prefix: compare with the doubled one
    while True:
        bits = thue_morse(2 * prefix_len)
        big = _WindowHash(bits)
        small = _WindowHash(bits[:prefix_len])
        if _distinct_count(small, prefix_len, top) == _distinct_count(big, 2 * prefix_len, top):
            break
        prefix_len *= 2
        if prefix_len > max_prefix:
            raise PrefixInsufficient("factor set of length %d did not stabilize below %d"
                                     % (top, max_prefix))
    bits = bits[:prefix_len]
    return {n: _unbordered_count(bits, small, n) for n in ns}


_ZERO_PATTERN = re.compile(r"1(01*0)*10*1")


def tm_unbordered_is_zero(n):
    """True iff the binary expansion of n is in 1(01*0)*10*1."""
    return n > 0 and _ZERO_PATTERN.fullmatch(format(n, "b")) is not None


# ---------------------------------------------------------------- definitions

def _definition(name, q, M, m, l, u, n0, rows, initial, row_offsets=None, inhomogeneities=None):
    coeffs = {}
    for s, row in enumerate(rows):
        for k, c in zip(range(l, u + 1), row):
            coeffs[(s, k)] = Fraction(c)
    return QRecursiveDefinition(q, M, m, l, u, n0, coeffs, tuple(Fraction(x) for x in initial),
                                row_offsets, inhomogeneities or {}, name)


def stern_definition():
    # d(2n) = d(n), d(2n + 1) = d(n) + d(n + 1)
    return _definition("stern", 2, 1, 0, 0, 1, 0, [(1, 0), (1, 1)], [0, 1])


def odd_pascal_definition():
    # p(2n) = 3 p(n), p(2n + 1) = 2 p(n) + p(n + 1)
    return _definition("odd_pascal", 2, 1, 0, 0, 1, 0, [(3, 0), (2, 1)], [0, 1])


PASCAL_Z_IDENTITIES = (
    identity((1, 1), [(3, 0, 0), (-1, 1, 0)]),          # z(2n+1) = 3 z(n) - z(2n)
    identity((2, 0), [(-1, 0, 0), (2, 1, 0)]),          # z(4n) = -z(n) + 2 z(2n)
    identity((2, 2), [(4, 0, 0), (-1, 1, 0)]),          # z(4n+2) = 4 z(n) - z(2n)
)


def pascal_z_definition():
    t = Fraction(1, 3)
    rows = [(5 * t, -t), (4 * t, t), (t, 4 * t), (-t, 5 * t)]
    return _definition("pascal_z", 2, 2, 1, 0, 1, 0, rows, [1, 2, 3, 3])


UNBORDERED_IDENTITIES = (
    identity((2, 0), [(2, 1, 0)], 2),                    # f(4n) = 2 f(2n)
    identity((2, 1), [(1, 1, 1)], 0),                    # f(4n+1) = f(2n+1)
    identity((3, 2), [(1, 1, 1), (1, 2, 3)], 1),         # f(8n+2) = f(2n+1) + f(4n+3)
    identity((3, 3), [(-1, 1, 1), (1, 2, 2)], 2),        # f(8n+3) = -f(2n+1) + f(4n+2)
    identity((3, 6), [(-1, 1, 1), (1, 2, 2), (1, 2, 3)], 2),
    identity((3, 7), [(2, 1, 1), (1, 2, 3)], 3),         # f(8n+7) = 2 f(2n+1) + f(4n+3)
)

UNBORDERED_START = (1, 2, 2, 4, 2, 4, 6, 0, 4, 4, 4, 4, 12, 0, 4, 4)


def unbordered_definition():
    rows = [
        (2, 0, 0, 0),
        (0, 1, 0, 0),
        (0, 1, 0, 1),
        (0, -1, 1, 0),
        (0, 0, 2, 0),
        (0, 0, 0, 1),
        (0, -1, 1, 1),
        (0, 2, 0, 1),
    ]
    init = list(UNBORDERED_START)
    counts = tm_unbordered_counts(range(16, 24))
    init += [counts[n] for n in range(16, 24)]
    return _definition("unbordered", 2, 3, 2, 0, 3, 3, rows, init,
                       row_offsets=(1, 0, 1, 2, 1, 0, 2, 3))


def sum_of_digits_definition():
    # s(4n) = s(2n), s(4n+1) = s(2n+1), s(4n+2) = s(2n+1), s(4n+3) = -s(2n) + 2 s(2n+1)
    rows = [(1, 0), (0, 1), (0, 1), (-1, 2)]
    return _definition("sum_of_digits", 2, 2, 1, 0, 1, 0, rows, [0, 1, 1, 2])


def largest_power_definition():
    # h(2n) = 2 h(n), h(2n + 1) = 2 h(n) for n >= 1
    return _definition("largest_power", 2, 1, 0, 0, 0, 1, [(2,), (2,)], [0, 1])


def artificial_general_coefficients(s, k):
    return (-1 if k < 0 else 1) * 10 * s + k


def artificial_general_definition(n0=1, initial=None):
    """q = 2, M = 3, m = 1, c[s, k] = +-10 s + k for k in {-1, 0, 1}."""
    rows = [tuple(artificial_general_coefficients(s, k) for k in (-1, 0, 1)) for s in range(8)]
    if initial is None:
        initial = [0] * 8 if n0 == 0 else [1, 2, 1, 3, 1, 2, 1, 4][:8 * max(n0, 1)]
    return _definition("artificial_general", 2, 3, 1, -1, 1, n0, rows, initial)


def artificial_special_definition(n0=1, initial=None):
    """q = 2, M = 3, m = 2 with all coefficients 1 (s < 4) or 2 (s >= 4)."""
    rows = [(1, 1, 1, 1)] * 4 + [(2, 2, 2, 2)] * 4
    if initial is None:
        initial = [0] * 8 if n0 == 0 else [1, 0, 2, 1, 0, 1, 1, 3]
    return _definition("artificial_special", 2, 3, 2, 0, 3, n0, rows, initial)


def digit_sum_inhomogeneous_definition():
    """s(2n) = s(n), s(2n + 1) = s(n) + 1, with the constant 1 as inhomogeneity."""
    one = LinearRepresentation(2, [[[1]], [[1]]], [1], [1], name="one")
    return _definition("digit_sum_inhomogeneous", 2, 1, 0, 0, 0, 0, [(1,), (1,)], [0, 1],
                       inhomogeneities={1: one})


# ---------------------------------------------------------------- known representations

STERN_MINIMAL = LinearRepresentation(
    2, [[[1, 0], [1, 1]], [[1, 1], [0, 1]]], [0, 1], [1, 0], name="stern_minimal")

PASCAL_Z_TWO_DIM = LinearRepresentation(
    2, [[[0, 1], [-1, 2]], [[3, -1], [4, -1]]], [1, 1], [1, 0], name="pascal_z_two_dim")


@dataclass(frozen=True)
class JsrRecipe:
    """How to bound the joint spectral radius for the asymptotic analysis.

    source "rep": matrices of the analysed representation; "blocks": the B_r
    of the special case, lifted by the special and offset shortcuts.
    minimize: analyse the minimized representation instead.
    fixed: a known offset-free representation of the sequence to analyse instead.
    """
    source: str = "rep"
    norm: str = "row"
    k_max: int = 4
    scaling: tuple = None
    minimize: bool = False
    fixed: object = None

STERN_JSR = JsrRecipe("rep", "spectral", 2, fixed=STERN_MINIMAL)
# B_r T = T A_r with A_r the minimal Stern matrices, so the scaled spectral norm is attained at k = 1
PASCAL_Z_JSR = JsrRecipe("blocks", "spectral", 2, scaling=((1, Fraction(1, 2)), (Fraction(1, 2), 1)))
UNBORDERED_JSR = JsrRecipe("blocks", "row", 2, scaling=(2, Fraction(1, 2), 1, 1))


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    description: str
    make_definition: object
    oracle: object = None          # independent first-principles oracle, if any
    special: bool = False          # eligible for the special-case construction
    minimal_dim: int = None
    jsr: "JsrRecipe" = None

    def definition(self):
        return validate_definition(self.make_definition())

    def sequence(self):
        return SequenceOracle(self.make_definition())


ENTRIES = {e.name: e for e in (
    CatalogEntry("stern", "Stern's diatomic sequence d", stern_definition, stern_oracle,
                 minimal_dim=2, jsr=STERN_JSR),
    CatalogEntry("odd_pascal", "odd entries in the first n rows of Pascal's triangle",
                 odd_pascal_definition, odd_pascal_oracle),
    CatalogEntry("pascal_z", "nonzero entries in row n of the binary Pascal triangle",
                 pascal_z_definition, pascal_z_oracle, special=True, minimal_dim=2,
                 jsr=PASCAL_Z_JSR),
    CatalogEntry("unbordered", "unbordered factors of length n of the Thue-Morse word",
                 unbordered_definition, tm_unbordered_oracle, special=True, minimal_dim=8,
                 jsr=UNBORDERED_JSR),
    CatalogEntry("sum_of_digits", "binary sum of digits, homogeneous form",
                 sum_of_digits_definition, binary_sum_of_digits, special=True, minimal_dim=2),
    CatalogEntry("largest_power", "largest power of 2 not exceeding n",
                 largest_power_definition, largest_power_of_two),
    CatalogEntry("artificial_general", "artificial example with M = 3, m = 1, l = -1, u = 1",
                 artificial_general_definition),
    CatalogEntry("artificial_special", "artificial special-case example with M = 3, m = 2",
                 artificial_special_definition, special=True),
    CatalogEntry("digit_sum_inhomogeneous", "binary sum of digits with a constant inhomogeneity",
                 digit_sum_inhomogeneous_definition, binary_sum_of_digits),
)}


def get_entry(name):
    try:
        return ENTRIES[name]
    except KeyError:
        raise UnknownEntry("no catalog entry named %r (have: %s)" % (name, ", ".join(ENTRIES)))


def analysis_inputs(entry):
    """(representation, JsrBounds, SpectrumReport) for the asymptotic analysis of an entry."""
    from .builder import build, build_special, special_blocks
    from .minimizer import minimize
    from .spectral import jsr_bounds, jsr_shortcuts, spectrum
    if isinstance(entry, str):
        entry = get_entry(entry)
    recipe = entry.jsr or JsrRecipe()
    d = entry.definition()
    oracle = SequenceOracle(d, validate=False)
    rep = recipe.fixed or build(d, special=entry.special, oracle=oracle)
    if recipe.minimize:
        rep = minimize(rep)[0]
    if recipe.source == "blocks":
        inner = jsr_bounds(special_blocks(build_special(d, oracle), d.m), recipe.k_max,
                           recipe.norm, recipe.scaling)
        bounds = jsr_shortcuts("special", inner)
        if d.offset:
            bounds = jsr_shortcuts("offset", bounds)
    else:
        bounds = jsr_bounds(rep.matrices, recipe.k_max, recipe.norm, recipe.scaling)
    return rep, bounds, spectrum(rep.sum_matrix())
