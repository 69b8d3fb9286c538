"""Eigenvalues, Jordan block sizes and joint spectral radius bounds.

Characteristic and minimal polynomials are computed exactly.  Their
square-free parts are split by exact gcds, so multiplicities and Jordan
sizes are exact; only the roots of each square-free factor are found
numerically, as eigenvalues of its companion matrix.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

from . import linalg as la
from .core import QRecursiveError


class ClusteringAmbiguous(QRecursiveError):
    pass


class DimensionMismatch(QRecursiveError):
    pass


CLUSTER_TOL = 1e-9


# ---------------------------------------------------------------- exact polynomials
# coefficient lists, highest degree first, no leading zeros (zero poly = [])

def _trim(p):
    i = 0
    while i < len(p) and p[i] == 0:
        i += 1
    return list(p[i:])


def poly_divmod(a, b):
    a, b = _trim(a), _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    quot = []
    rem = list(a)
    while len(rem) >= len(b):
        c = rem[0] / b[0]
        quot.append(c)
        rem = [x - c * y for x, y in zip(rem, b + [0] * (len(rem) - len(b)))][1:]
    return quot, _trim(rem)


def poly_gcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, poly_divmod(a, b)[1]
    return [x / a[0] for x in a] if a else []


def poly_deriv(p):
    n = len(p) - 1
    return _trim([c * (n - i) for i, c in enumerate(p[:-1])])


def poly_sub(a, b):
    n = max(len(a), len(b))
    return _trim([x - y for x, y in zip(_pad(a, n), _pad(b, n))])


def _pad(p, n):
    """Left-pad p with zeros to length n."""
    return [Fraction(0)] * (n - len(p)) + list(p)


def squarefree_factors(p):
    """Yun's algorithm: [(g_1, 1), (g_2, 2), ...] with p = c * prod g_i**i, g_i monic."""
    p = _trim(p)
    out = []
    if len(p) <= 1:
        return out
    dp = poly_deriv(p)
    a = poly_gcd(p, dp)
    b = poly_divmod(p, a)[0]
    c = poly_divmod(dp, a)[0]
    d = poly_sub(c, poly_deriv(b))
    i = 1
    while len(b) > 1:
        g = poly_gcd(b, d) if d else [x / b[0] for x in b]
        if len(g) > 1:
            out.append((g, i))
        b = poly_divmod(b, g)[0]
        c = poly_divmod(d, g)[0] if d else []
        d = poly_sub(c, poly_deriv(b))
        i += 1
    return out


def _divisors(n, limit=10 ** 13):
    """Positive divisors by trial division, None above the limit."""
    n = abs(n)
    if n > limit:
        return None
    out = set()
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.update((d, n // d))
        d += 1
    return out


def _rational_roots(p):
    """Rational roots of p (rational root test), or [] when the search is too large."""
    den = math.lcm(*(Fraction(c).denominator for c in p))
    ints = [int(c * den) for c in p]
    g = math.gcd(*ints)
    ints = [c // g for c in ints]
    roots = []
    if ints[-1] == 0:
        roots.append(Fraction(0))
        while ints and ints[-1] == 0:
            ints.pop()
    if len(ints) <= 1:
        return roots
    num, lead = _divisors(ints[-1]), _divisors(ints[0])
    if num is None or lead is None:
        return roots
    for a in num:
        for b in lead:
            for x in (Fraction(a, b), Fraction(-a, b)):
                if x not in roots and sum(c * x ** (len(ints) - 1 - i) for i, c in enumerate(ints)) == 0:
                    roots.append(x)
    return roots


def _poly_roots(p):
    """Roots of a square-free rational polynomial; rational roots are exact."""
    p = _trim(p)
    exact = _rational_roots(p)
    for x in exact:
        p = poly_divmod(p, [Fraction(1), -x])[0]
    if len(p) <= 1:
        return exact
    coeffs = np.array([float(c) for c in p])
    roots = np.roots(coeffs).astype(complex)
    # a few Newton steps on the exact-coefficient polynomial
    dcoeffs = np.polyder(coeffs)
    with np.errstate(divide="ignore", invalid="ignore"):
        for _ in range(3):
            step = np.polyval(coeffs, roots) / np.polyval(dcoeffs, roots)
            roots = roots - np.where(np.isfinite(step), step, 0)
    return exact + list(roots)


@dataclass(frozen=True)
class Eigenvalue:
    value: complex
    algebraic_multiplicity: int
    jordan_size: int
    exact: Fraction = None       # set when the eigenvalue is rational

    @property
    def modulus(self):
        return abs(self.value)


@dataclass
class SpectrumReport:
    char_poly: list
    min_poly: list
    eigenvalues: list

    def values(self):
        return [e.value for e in self.eigenvalues]

    def find(self, lam, tol=1e-7):
        for e in self.eigenvalues:
            if abs(e.value - lam) <= tol * max(1.0, abs(lam)):
                return e
        return None

    def jordan_size(self, lam):
        e = self.find(lam)
        return 0 if e is None else e.jordan_size

    def __str__(self):
        return "\n".join("%s  mult %d  jordan %d" % (fmt_complex(e.value), e.algebraic_multiplicity,
                                                      e.jordan_size) for e in self.eigenvalues)


def fmt_complex(z, digits=15):
    z = complex(z)
    if abs(z.imag) <= 1e-14 * max(1.0, abs(z.real)):
        return "%.*g" % (digits, z.real)
    return "%.*g%+.*gi" % (digits, z.real, digits, z.imag)


def spectrum(C, tol=CLUSTER_TOL):
    """Eigenvalues of an exact square matrix with multiplicities and Jordan sizes."""
    n = len(C)
    if any(len(row) != n for row in C):
        raise DimensionMismatch("matrix is not square")
    C = la.matrix(C)
    cp = la.char_poly(C)
    mp = la.min_poly(C)
    eigs = []
    for g, alg in squarefree_factors(cp):
        for h, jor in squarefree_factors(mp):
            common = poly_gcd(g, h)
            if len(common) <= 1:
                continue
            for root in _poly_roots(common):
                if isinstance(root, Fraction):
                    eigs.append(Eigenvalue(complex(float(root)), alg, jor, root))
                else:
                    eigs.append(Eigenvalue(complex(root), alg, jor))
    eigs.sort(key=lambda e: (-abs(e.value), -e.value.real, -e.value.imag))
    for i in range(len(eigs)):
        for j in range(i + 1, len(eigs)):
            if eigs[i].exact is not None and eigs[j].exact is not None:
                continue
            if abs(eigs[i].value - eigs[j].value) < 10 * tol * max(1.0, abs(eigs[i].value)):
                raise ClusteringAmbiguous("eigenvalues %s and %s are too close to separate"
                                          % (eigs[i].value, eigs[j].value))
    return SpectrumReport(cp, mp, eigs)


def spectrum_shortcuts(mode, inner, n0=None, q=None, m=None):
    """Spectrum of a corrected or special-case representation from a smaller one.

    mode "offset": inner is the spectrum of C; correcting an offset n0 adds the
    eigenvalue 1 once and, for n0 >= 2, the eigenvalue 0 with multiplicity n0 - 1.
    mode "special": inner is the spectrum of sum B_r; the (q^m - 1)/(q - 1)
    leading components add the eigenvalue 0.
    Added eigenvalues get the Jordan size of the inner spectrum (at least 1);
    for them this is only a lower bound.
    """
    if mode == "offset":
        if not n0 or n0 < 1:
            raise ValueError("offset shortcut needs n0 >= 1")
        add = {Fraction(1): 1}
        if n0 >= 2:
            add[Fraction(0)] = n0 - 1
    elif mode == "special":
        if q is None or m is None:
            raise ValueError("special shortcut needs q and m")
        add = {Fraction(0): (q ** m - 1) // (q - 1)}
    else:
        raise ValueError("mode must be 'offset' or 'special'")
    eigs = list(inner.eigenvalues)
    for lam, mult in add.items():
        if not mult:
            continue
        e = inner.find(complex(float(lam)))
        if e is None:
            eigs.append(Eigenvalue(complex(float(lam)), mult, 1, lam))
        else:
            eigs[eigs.index(e)] = Eigenvalue(e.value, e.algebraic_multiplicity + mult,
                                             e.jordan_size, lam)
    eigs.sort(key=lambda e: (-abs(e.value), -e.value.real, -e.value.imag))
    return SpectrumReport(None, None, eigs)


# ---------------------------------------------------------------- joint spectral radius

@dataclass
class JsrBounds:
    lower: float
    upper: float
    depth: int                       # product length attaining the upper bound
    norm: str
    finiteness_certificate: tuple    # word w attaining the lower bound, or None
    simple_growth: bool = None       # None when undecided
    lower_word: tuple = None

    @property
    def certified(self):
        return self.finiteness_certificate is not None


def _norm(G, norm, T=None, Tinv=None):
    """Exact row/column sums, float spectral norm."""
    if T is not None:
        G = la.matmul(la.matmul(Tinv, G), T)
    if norm in ("row", "inf", "row-sum"):
        return max((sum(abs(x) for x in row) for row in G), default=0)
    if norm in ("col", "1", "column-sum"):
        return max((sum(abs(row[j]) for row in G) for j in range(len(G))), default=0)
    if norm in ("spectral", "2"):
        return float(np.linalg.norm(la.to_float(G), 2)) if G else 0.0
    raise ValueError("unknown norm %r" % norm)


def _root(x, k):
    x = float(x)
    return x ** (1.0 / k) if x > 0 else 0.0


def spectral_radius(G):
    """Largest eigenvalue modulus; repeated eigenvalues are resolved exactly when possible."""
    if not G:
        return 0.0
    try:
        return max((e.modulus for e in spectrum(G).eigenvalues), default=0.0)
    except ClusteringAmbiguous:
        return float(max(abs(np.linalg.eigvals(la.to_float(G)))))


def jsr_bounds(matrices, k_max=4, norm="row", scaling=None, tol=1e-12):
    """Bounds lower <= JSR <= upper from products of length at most k_max.

    upper = min_k max_{|w| = k} ||A_w||**(1/k); lower = max rho(A_w)**(1/|w|).
    With scaling T (a diagonal list or full matrix) the norm is ||T^-1 G T||.
    """
    mats = [la.matrix(a) for a in matrices]
    T = Tinv = None
    if scaling is not None:
        if not isinstance(scaling[0], (tuple, list)):
            scaling = [[scaling[i] if i == j else 0 for j in range(len(scaling))]
                       for i in range(len(scaling))]
        T = la.matrix(scaling)
        Tinv = la.inverse(T)
    if len(mats) == 1:
        return _single_matrix(mats[0], norm)
    upper, depth = math.inf, 0
    lower, lower_word = 0.0, None
    level = {(): la.identity(len(mats[0]))}
    for k in range(1, k_max + 1):
        nxt = {}
        seen = set()
        for w, G in level.items():
            for r, a in enumerate(mats):
                P = la.matmul(G, a)
                if P in seen:
                    continue
                seen.add(P)
                nxt[w + (r,)] = P
        level = nxt
        best = max(_norm(P, norm, T, Tinv) for P in level.values())
        bound = _root(best, k)
        if bound < upper - tol:
            upper, depth = bound, k
        for w, P in level.items():
            rho = _root(spectral_radius(P), k)
            if rho > lower + tol:
                lower, lower_word = rho, w
    cert = lower_word if upper - lower <= 1e-9 * max(1.0, upper) else None
    return JsrBounds(lower, upper, depth, norm, cert, True if cert else None, lower_word)


def _single_matrix(A, norm):
    """A single matrix: the joint spectral radius is its spectral radius."""
    spec = spectrum(A)
    rho = max((e.modulus for e in spec.eigenvalues), default=0.0)
    top = [e for e in spec.eigenvalues if abs(e.modulus - rho) <= 1e-9 * max(1.0, rho)]
    simple = all(e.jordan_size == 1 for e in top) if rho > 0 else True
    return JsrBounds(rho, rho, 0, "spectral-radius", (0,) if simple else None, simple, (0,))


def power_growth(A, exponents=(1, 2, 4, 8, 16, 32, 64)):
    """||A^k|| / rho^k along k; unbounded growth means no simple growth."""
    rho = spectral_radius(A)
    F = la.to_float(A)
    out = []
    for k in exponents:
        P = np.linalg.matrix_power(F, k)
        out.append(float(np.abs(P).sum(axis=1).max()) / rho ** k if rho else float(np.abs(P).max()))
    return out


def jsr_shortcuts(mode, inner):
    """JSR bounds of a corrected (mode "offset") or special-case ("special") representation."""
    if mode == "offset":
        lower, upper = max(inner.lower, 1.0), max(inner.upper, 1.0)
        simple = None
        if inner.lower > 1.0 and inner.simple_growth:
            simple = True
        cert = inner.finiteness_certificate if inner.lower >= 1.0 else None
        return JsrBounds(lower, upper, inner.depth, inner.norm, cert, simple, inner.lower_word)
    if mode == "special":
        simple = inner.simple_growth if inner.lower > 0 else None
        return JsrBounds(inner.lower, inner.upper, inner.depth, inner.norm,
                         inner.finiteness_certificate, simple, inner.lower_word)
    raise ValueError("mode must be 'offset' or 'special'")
