"""Dirichlet series, Fourier coefficients and asymptotic expansions of summatory functions.

For a linear representation the tail series V(s) = sum_{n >= eta} v(n) n^-s
satisfies

    (I - q^-s C) V(s) = sum_{eta <= n < q eta} v(n) n^-s
                        + q^-s sum_{k >= 1} binom(-s, k) M_k V(s + k),

with C = sum_r A_r and M_k = sum_r (r/q)^k A_r.  (Write n = q n' + r with
n' >= eta and expand (q n' + r)^-s = q^-s n'^-s (1 + r/(q n'))^-s.)  The
k-th term is of size about (|s| / (q eta))^k, so a large eta avoids the
cancellation that eta = 1 suffers from for large imaginary parts.  V(s + k)
comes from the same equation further to the right, and finally from direct
summation once the truncation tail is below the working precision.

At a pole s0 with q^s0 = lam, on the lam-eigenspace the factor
1 - lam q^-s equals (s - s0) log q + O((s - s0)^2).  Hence
Res V(s0) = P_lam Y(s0) / log q with Y the right-hand side and P_lam the
spectral projection.  Dividing by s0 gives the Fourier coefficient of the
periodic fluctuation; x(0) and the head sum over n < eta are entire and
contribute no residue as long as s0 != 0.
"""

from dataclasses import dataclass, field, replace
from fractions import Fraction
import cmath
import math

import numpy as np

from . import linalg as la
from .core import QRecursiveError, SequenceOracle, rep_vectors, validate_definition
from .spectral import spectrum as exact_spectrum


class NoSeparation(QRecursiveError):
    pass


class NearPole(QRecursiveError):
    pass


class DepthExceeded(QRecursiveError):
    pass


class NotSimpleEigenvalue(QRecursiveError):
    pass


POLE_COND = 1e12


@dataclass
class DirichletConfig:
    direct_sum_cutoff: int = 100000       # N0, raised to 32 eta when eta is large
    series_truncation: int = 400          # cap on binomial-series terms (K is adaptive)
    shift_depth: int = 80                 # cap on levels s, s+1, ... solved by the equation
    convergence_abscissa: float = None    # log_q R + 1; derived from JSR bounds when None
    precision: int = 15                   # decimal digits; above 15 mpmath is used
    eta: int = None                       # tail start; chosen from |s| when None
    tol: float = 1e-17                    # relative size of the last binomial term


# ---------------------------------------------------------------- arithmetic

class _Float:
    digits = 15
    pi = math.pi

    def num(self, x):
        return complex(x)

    def array(self, rows):
        return np.array(rows, dtype=complex)

    def log(self, x):
        return math.log(x)

    def exp(self, z):
        return cmath.exp(z)

    def logs(self, ints):
        return np.log(np.asarray(ints, dtype=float))

    def weights(self, logb, t):
        return np.exp(-t * logb)

    def solve(self, a, b):
        return np.linalg.solve(a, b)

    def norm(self, v):
        return float(np.abs(v).max()) if len(v) else 0.0


class _Mp:
    """Extended precision through a private mpmath context."""

    def __init__(self, digits):
        from mpmath.ctx_mp import MPContext
        self.ctx = MPContext()
        self.ctx.dps = digits + 5
        self.digits = digits
        self.pi = self.ctx.pi
        self._exp = np.frompyfunc(self.ctx.exp, 1, 1)
        self._log = np.frompyfunc(lambda n: self.ctx.log(int(n)), 1, 1)

    def num(self, x):
        if isinstance(x, Fraction):
            return self.ctx.mpf(x.numerator) / x.denominator
        if isinstance(x, (int, float, np.integer, np.floating)):
            return self.ctx.mpf(x)
        return self.ctx.mpc(x)

    def array(self, rows):
        rows = list(rows)
        if rows and isinstance(rows[0], (list, tuple, np.ndarray)):
            return np.array([[self.num(x) for x in row] for row in rows], dtype=object)
        return np.array([self.num(x) for x in rows], dtype=object)

    def log(self, x):
        return self.ctx.log(x)

    def exp(self, z):
        return self.ctx.exp(z)

    def logs(self, ints):
        return self._log(np.asarray(ints, dtype=object))

    def weights(self, logb, t):
        return self._exp(-t * logb)

    def solve(self, a, b):
        sol = self.ctx.lu_solve(self.ctx.matrix(a.tolist()), self.ctx.matrix(list(b)))
        return np.array([sol[i] for i in range(len(b))], dtype=object)

    def norm(self, v):
        return max((abs(complex(x)) for x in v), default=0.0)


def _backend(cfg):
    return _Float() if cfg.precision <= 15 else _Mp(cfg.precision)


# ---------------------------------------------------------------- the functional equation

class _Equation:
    """Tail series W(t) = sum_i vals_i base_i^-t and its functional equation.

    Subclasses provide _M_exact(k), _build(eta, N0) -> (vals, log bases),
    min_eta and base_scale (bases near index eta are about base_scale * eta).
    """

    def __init__(self, q, C, growth, cfg):
        self.q = q
        self.C_exact = la.matrix(C)
        self.D = len(self.C_exact)
        self.growth = growth
        self.cfg = cfg
        self.ar = _backend(cfg)
        self.C = self.ar.array([list(row) for row in self.C_exact]) if self.D else \
            np.zeros((0, 0), dtype=complex)
        self.logq = self.ar.log(q)
        self._M = {}
        self._data = {}

    def M(self, k):
        if k not in self._M:
            self._M[k] = self.ar.array([list(row) for row in self._M_exact(k)])
        return self._M[k]

    def choose_eta(self, s):
        if self.cfg.eta is not None:
            return max(self.cfg.eta, self.min_eta)
        target = 4.0 * abs(s) / self.base_scale + 16
        eta = max(self.min_eta, 64)
        while eta < target:
            eta *= 2
        return eta

    def data(self, eta):
        if eta not in self._data:
            N0 = max(self.cfg.direct_sum_cutoff, 32 * eta)
            vals, logb = self._build(eta, N0)
            cut = (self.q - 1) * eta
            self._data[eta] = (vals, logb, cut, N0)
        return self._data[eta]

    def direct_depth(self, s, eta, N0):
        """Smallest j such that the sum over indices <= N0 at s + j has a negligible tail."""
        need = math.log(10) * (self.ar.digits + 2) / math.log(N0 / eta)
        j = max(0, math.ceil(self.growth + 1 + need - complex(s).real))
        if j > self.cfg.shift_depth:
            raise DepthExceeded("need %d levels of the functional equation, cap is %d"
                                % (j, self.cfg.shift_depth))
        return j

    def condition(self, s):
        if not self.D:
            return 1.0
        a = np.eye(self.D) - np.array(self.C, dtype=complex) * cmath.exp(-complex(s) * math.log(self.q))
        sv = np.linalg.svd(a, compute_uv=False)
        # cond alone misses poles of small systems (a 1 x 1 matrix always has cond 1)
        return float(max(sv[0], 1.0) / sv[-1]) if sv[-1] > 0 else math.inf

    def solver(self, s, eta=None):
        """Return (W, rhs, eta): W(j) = tail series at s + j, rhs(j) the right-hand side there."""
        ar = self.ar
        s = ar.num(s)
        eta = eta or self.choose_eta(complex(s))
        vals, logb, cut, N0 = self.data(eta)
        J = self.direct_depth(complex(s), eta, N0)
        w0 = ar.weights(logb, s)
        memo = {}
        ident = ar.array([[1 if i == k else 0 for k in range(self.D)] for i in range(self.D)]) \
            if self.D else np.zeros((0, 0))

        def shifted(j, rows=None):
            w, lb, v = (w0, logb, vals) if rows is None else (w0[:rows], logb[:rows], vals[:rows])
            if j:
                w = w * (np.exp(-j * lb) if isinstance(ar, _Float) else ar.weights(lb, j))
            return (v * w).sum(axis=0)

        def series(j):
            t = s + j
            acc = ar.array([0] * self.D)
            b = ar.num(1)
            small = 0
            tol = min(self.cfg.tol, 10.0 ** (-ar.digits - 2))
            for k in range(1, self.cfg.series_truncation + 1):
                b = b * (-t - (k - 1)) / k
                term = self.M(k).dot(W(j + k)) * b
                acc = acc + term
                if ar.norm(term) <= tol * max(ar.norm(acc), 1e-300):
                    small += 1
                    if small >= 2:
                        return acc * ar.exp(-t * self.logq)
                else:
                    small = 0
            raise DepthExceeded("binomial series did not converge within %d terms"
                                % self.cfg.series_truncation)

        def rhs(j):
            return shifted(j, cut) + series(j)

        def W(j):
            if j not in memo:
                if j >= J:
                    memo[j] = shifted(j)
                else:
                    for i in range(J - 1, j, -1):   # right to left keeps recursion shallow
                        if i not in memo:
                            W(i)
                    a = ident - self.C * ar.exp(-(s + j) * self.logq)
                    memo[j] = ar.solve(a, rhs(j))
            return memo[j]

        return W, rhs, eta


class RepresentationEquation(_Equation):
    """Tail Dirichlet series of the vector sequence v of an offset-free representation."""

    def __init__(self, rep, growth, cfg):
        if rep.validity_offset:
            raise ValueError("need an offset-free representation")
        super().__init__(rep.q, rep.sum_matrix(), growth, cfg)
        self.rep = rep
        self.min_eta = 1
        self.base_scale = rep.q

    def _M_exact(self, k):
        out = la.zeros(self.D, self.D)
        for r, a in enumerate(self.rep.matrices):
            if r:
                out = la.matadd(out, la.matscale(Fraction(r, self.q) ** k, a))
        return out

    def values(self, n_max):
        if isinstance(self.ar, _Float):
            return _float_vectors(self.rep, n_max)
        return np.array([[self.ar.num(x) for x in v] for v in rep_vectors(self.rep, n_max)],
                        dtype=object).reshape(n_max + 1, self.D)

    def _build(self, eta, N0):
        return self.values(N0)[eta:], self.ar.logs(np.arange(eta, N0 + 1))[:, None]

    def head(self, s, eta):
        """sum_{1 <= n < eta} v(n) n^-s, an entire function."""
        if eta <= 1:
            return self.ar.array([0] * self.D)
        vals = self.values(eta)[1:eta]
        w = self.ar.weights(self.ar.logs(np.arange(1, eta))[:, None], self.ar.num(s))
        return (vals * w).sum(axis=0)


def _float_vectors(rep, n_max):
    """v(0..n_max) in floating point, one digit level at a time."""
    q, D = rep.q, rep.dim
    mats = [la.to_float(a) for a in rep.matrices]
    out = np.zeros((n_max + 1, D))
    out[0] = [float(x) for x in rep.v0]
    lo = 1
    while lo <= n_max:
        hi = min(lo * q, n_max + 1)
        n = np.arange(lo, hi)
        for r in range(q):
            sel = n[n % q == r]
            if len(sel) and D:
                out[sel] = out[sel // q] @ mats[r].T
        lo = hi
    return out


class SpecialEquation(_Equation):
    """X_j(s) = sum_{n >= eta} x(q^m n + j) (q^m n + j)^-s for the special case M = m + 1."""

    def __init__(self, definition, growth, cfg):
        from .builder import is_special_case, SpecialCaseViolation
        d = validate_definition(definition)
        if not is_special_case(d):
            raise SpecialCaseViolation("need M = m + 1, l = 0 and u = q^m - 1")
        qm = d.qm
        S = la.zeros(qm, qm)
        for r in range(d.q):
            S = la.matadd(S, tuple(tuple(d.coeff(r * qm + j, k) for k in range(qm)) for j in range(qm)))
        super().__init__(d.q, S, growth, cfg)
        self.definition = d
        self.oracle = SequenceOracle(d, validate=False)
        self.min_eta = max(d.offset, 1)
        self.base_scale = d.q * qm
        self.qm = qm

    def _M_exact(self, k):
        # x(q^m (q n + mu) + j) = sum_k c_{mu q^m + j, k} x(q^m n + k) and
        # q^m (q n + mu) + j = q (q^m n + k + beta), beta = (mu q^m + j)/q - k
        d, q, qm = self.definition, self.q, self.qm
        rows = []
        for j in range(qm):
            row = []
            for kk in range(qm):
                acc = Fraction(0)
                for mu in range(q):
                    c = d.coeff(mu * qm + j, kk)
                    if c:
                        acc += c * (Fraction(mu * qm + j, q) - kk) ** k
                row.append(acc)
            rows.append(row)
        return rows

    def _build(self, eta, N0):
        qm, ar = self.qm, self.ar
        xs = self.oracle.values(qm * (N0 + 1))
        bases = qm * np.arange(eta, N0 + 1)[:, None] + np.arange(qm)[None, :]
        if isinstance(ar, _Float):
            vals = np.array([float(x) for x in xs])[bases]
        else:
            vals = np.array([[ar.num(Fraction(xs[b])) for b in row] for row in bases], dtype=object)
        return vals, ar.logs(bases)

    def head(self, s, eta):
        """sum_{1 <= n < q^m eta} x(n) n^-s."""
        ar = self.ar
        xs = self.oracle.values(self.qm * eta)
        total = ar.num(0)
        for n in range(1, self.qm * eta):
            if xs[n]:
                total += ar.num(Fraction(xs[n])) * ar.exp(-ar.num(s) * ar.log(n))
        return total


# ---------------------------------------------------------------- growth and R

def _growth(rep, cfg, growth):
    """Exponent a with v(n) = O(n^a) up to logarithms."""
    if growth is not None:
        return growth
    if cfg.convergence_abscissa is not None:
        return cfg.convergence_abscissa - 1
    from .spectral import jsr_bounds
    b = jsr_bounds(rep.matrices, k_max=3, norm="row")
    return math.log(b.upper) / math.log(rep.q) if b.upper > 0 else -1.0


def choose_R(jsr, spec, tol=1e-9):
    """R for the error term: the JSR under simple growth, otherwise just above its upper bound."""
    lo, hi = jsr.lower, jsr.upper
    scale = max(1.0, hi)
    if jsr.simple_growth and hi - lo <= tol * scale:
        return hi
    R = hi * (1 + tol) if hi > 0 else tol
    close = [e for e in spec.eigenvalues if lo - tol * scale <= e.modulus <= R + tol * scale]
    if close:
        raise NoSeparation("eigenvalue(s) %s of modulus in [%.12g, %.12g] without simple growth"
                           % (", ".join(_fmt(e.value) for e in close), lo, hi))
    return R


# ---------------------------------------------------------------- evaluation

def dirichlet_eval(rep, s, cfg=None, growth=None, method="auto"):
    """V(s) = sum_{n >= 1} v(n) n^-s for Re s > log_q R.

    method "direct" sums n <= N0 only; "functional" always checks the pole
    distance; "auto" lets the tail bound decide how many levels are needed.
    """
    cfg = cfg or DirichletConfig()
    growth = _growth(rep, cfg, growth)
    s = complex(s)
    if s.real <= growth:
        raise NearPole("Re s = %g is not right of log_q R = %g" % (s.real, growth))
    eq = RepresentationEquation(rep, growth, cfg)
    if method == "direct":
        N0 = cfg.direct_sum_cutoff
        vals = eq.values(N0)[1:]
        w = eq.ar.weights(eq.ar.logs(np.arange(1, N0 + 1))[:, None], eq.ar.num(s))
        return (vals * w).sum(axis=0)
    eta = eq.choose_eta(s)
    N0 = eq.data(eta)[3]
    if method == "functional" or eq.direct_depth(s, eta, N0) > 0:
        c = eq.condition(s)
        if c > POLE_COND:
            raise NearPole("I - q^-s C has condition number %.3g at s = %s" % (c, s))
    W, _, eta = eq.solver(s, eta)
    return eq.head(s, eta) + W(0)


def dirichlet_rhs(rep, s, cfg=None, growth=None):
    """Right-hand side with eta = 1, built from separately evaluated V(s + k).

    The residual (I - q^-s C) V(s) - dirichlet_rhs(s) checks the recursion.
    """
    cfg = cfg or DirichletConfig()
    growth = _growth(rep, cfg, growth)
    s = complex(s)
    q = rep.q
    eq = RepresentationEquation(rep, growth, cfg)
    vals = eq.values(q)
    acc = sum((vals[n] * n ** (-s) for n in range(1, q)), np.zeros(rep.dim, dtype=complex))
    series = np.zeros(rep.dim, dtype=complex)
    b = 1.0 + 0j
    for k in range(1, cfg.series_truncation + 1):
        b = b * (-s - (k - 1)) / k
        Mk = np.array(eq.M(k), dtype=complex)
        if not Mk.any():
            continue
        term = b * Mk.dot(dirichlet_eval(rep, s + k, cfg, growth))
        series += term
        if np.abs(term).max() <= 1e-18 * max(np.abs(series).max(), 1e-300):
            break
    return acc + q ** (-s) * series


# ---------------------------------------------------------------- residues

def _projection(C_exact, lam, entry):
    """Spectral projection onto the eigenspace of a semisimple eigenvalue, normalized W U = I."""
    D = len(C_exact)
    if entry is not None and entry.exact is not None:
        A = la.matadd(C_exact, la.matscale(-entry.exact, la.identity(D)))
        U = la.transpose(la.nullspace(A))        # columns: right eigenvectors
        W = la.nullspace(la.transpose(A))        # rows: left eigenvectors
        return la.matmul(la.matmul(U, la.inverse(la.matmul(W, U))), W)
    g = entry.algebraic_multiplicity if entry is not None else 1
    A = la.to_float(C_exact).astype(complex) - lam * np.eye(D)
    U = np.linalg.svd(A)[2][-g:].conj().T
    W = np.linalg.svd(A.T)[2][-g:].conj()
    return U @ np.linalg.inv(W @ U) @ W


def _mp_projection(ar, C_exact, entry, min_poly):
    """P = h(C) / h(lam) with min_poly = (x - lam) h, lam polished by Newton in working precision."""
    coeffs = [ar.num(Fraction(c)) for c in min_poly]
    lam = ar.num(entry.value)
    for _ in range(60):
        f = df = ar.num(0)
        for c in coeffs:
            df = df * lam + f
            f = f * lam + c
        step = f / df
        lam -= step
        if abs(step) <= abs(lam) * ar.num(10) ** (-ar.digits - 4):
            break
    h = [coeffs[0]]
    for c in coeffs[1:-1]:
        h.append(h[-1] * lam + c)
    D = len(C_exact)
    C = ar.array([list(row) for row in C_exact])
    H = ar.array([[0] * D for _ in range(D)])
    hl = ar.num(0)
    for c in h:
        H = H.dot(C)
        for i in range(D):
            H[i, i] += c
        hl = hl * lam + c
    return H / hl, lam


@dataclass
class FluctuationTable:
    eigenvalue: complex
    exponent: complex                 # log_q(eigenvalue)
    k: int = 0                        # log-power index
    coefficients: dict = field(default_factory=dict)    # mu -> phi_mu
    residue_check: dict = field(default_factory=dict)   # mu -> |projection - limit estimate|
    mirrored: tuple = ()              # mu filled in by conjugate symmetry

    def to_rows(self):
        return [(mu, complex(c).real, complex(c).imag) for mu, c in sorted(self.coefficients.items())]


def _mus(mu_range):
    if isinstance(mu_range, int):
        return list(range(-mu_range, mu_range + 1))
    return list(mu_range)


def _residues(eq, select, entry, mus, check):
    """phi_mu = select(Res W(s_mu)) / s_mu, and the limit-based cross-check."""
    ar = eq.ar
    if isinstance(ar, _Float):
        P = _projection(eq.C_exact, entry.value, entry)
        P = la.to_float(P).astype(complex) if isinstance(P, tuple) else P
        log_lam = cmath.log(entry.value)
        if entry.exact is not None and entry.exact > 0:
            log_lam = math.log(entry.exact)
    elif entry.exact is not None:
        P = ar.array([list(row) for row in _projection(eq.C_exact, entry.value, entry)])
        log_lam = ar.log(ar.num(entry.exact)) if entry.exact > 0 else \
            ar.ctx.log(ar.ctx.mpc(ar.num(entry.exact)))
    else:
        P, lam = _mp_projection(ar, eq.C_exact, entry, la.min_poly(eq.C_exact))
        log_lam = ar.ctx.log(lam)
    table, checks = {}, {}
    for mu in mus:
        s = log_lam / eq.logq + 2 * ar.pi * 1j * mu / eq.logq
        if abs(complex(s)) < 1e-12:
            raise NotSimpleEigenvalue("the pole at s = 0 collides with the factor 1/s")
        W, rhs, eta = eq.solver(s)
        phi = select(P.dot(rhs(0)) / eq.logq) / s
        table[mu] = complex(phi) if isinstance(ar, _Float) else phi
        if check:
            # eps (W(s+eps) - W(s-eps)) / 2 = Res + O(eps^2); one Richardson step removes eps^2
            def limit(eps):
                diff = eq.solver(s + eps, eta)[0](0) - eq.solver(s - eps, eta)[0](0)
                return select(diff * eps / 2) / s
            est = (4 * limit(1e-4) - limit(2e-4)) / 3
            checks[mu] = abs(complex(est) - complex(phi))
    return table, checks


def _table(eq, select, lam, mu_range, check, spec=None):
    spec = spec or exact_spectrum(eq.C_exact)
    e = spec.find(lam)
    if e is None:
        raise NotSimpleEigenvalue("%s is not an eigenvalue" % _fmt(lam))
    if e.jordan_size != 1:
        raise NotSimpleEigenvalue("eigenvalue %s has a Jordan block of size %d" % (_fmt(lam), e.jordan_size))
    if abs(e.value) <= eq.q ** eq.growth * (1 + 1e-12):
        raise NoSeparation("|lambda| = %.12g does not exceed R = %.12g" % (abs(e.value), eq.q ** eq.growth))
    table, checks = _residues(eq, select, e, _mus(mu_range), check)
    return FluctuationTable(e.value, cmath.log(e.value) / math.log(eq.q), 0, table, checks)


def fourier_coefficients(rep, lam, mu_range=10, cfg=None, growth=None, spec=None, check=True):
    """Fourier coefficients phi_mu of the fluctuation belonging to a simple eigenvalue lam."""
    cfg = cfg or DirichletConfig()
    eq = RepresentationEquation(rep, _growth(rep, cfg, growth), cfg)
    sel = eq.ar.array(list(rep.selection))
    return _table(eq, lambda v: sel.dot(v), lam, mu_range, check, spec)


class SpecialDirichlet:
    """Block Dirichlet series of a special-case definition, without a representation."""

    def __init__(self, definition, eta=None, cfg=None, growth=None):
        cfg = cfg or DirichletConfig()
        if eta is not None:
            cfg = replace(cfg, eta=eta)
        if growth is None:
            growth = _special_growth(definition, cfg)
        self.eq = SpecialEquation(definition, growth, cfg)
        if eta is not None and eta < self.eq.min_eta:
            raise ValueError("eta must be at least the offset %d" % self.eq.min_eta)
        self.spectrum = exact_spectrum(self.eq.C_exact) if self.eq.D else None

    def block(self, s):
        """The vector (X_j(s))_{0 <= j < q^m}."""
        return self.eq.solver(complex(s))[0](0)

    def total(self, s):
        """sum_{n >= 1} x(n) n^-s: the blocks plus the excluded initial terms."""
        W, _, eta = self.eq.solver(complex(s))
        return W(0).sum() + self.eq.head(s, eta)

    def fourier(self, lam, mu_range=10, check=True):
        return _table(self.eq, lambda v: v.sum(), lam, mu_range, check, self.spectrum)

    def tables(self, mu_max=10, check=False):
        """One table per eigenvalue of sum B_r of modulus above R."""
        R = self.eq.q ** self.eq.growth
        eigs = self.spectrum.eigenvalues if self.spectrum else []
        return [self.fourier(e.value, mu_max, check) for e in eigs if e.modulus > R * (1 + 1e-9)]


def _special_growth(definition, cfg):
    if cfg.convergence_abscissa is not None:
        return cfg.convergence_abscissa - 1
    from .builder import build_special, special_blocks
    from .spectral import jsr_bounds
    d = validate_definition(definition)
    b = jsr_bounds(special_blocks(build_special(d), d.m), k_max=3, norm="row")
    return math.log(b.upper) / math.log(d.q) if b.upper > 0 else -1.0


def special_dirichlet(definition, eta=None, cfg=None, growth=None):
    return SpecialDirichlet(definition, eta, cfg, growth)


# ---------------------------------------------------------------- expansions

@dataclass
class AsymptoticExpansion:
    q: int
    R: float
    error_exponent: float            # log_q R
    error_log_power: int             # max m_C(lam) over |lam| = R
    terms: list                      # FluctuationTable for every |lam| > R

    def describe(self):
        parts = ["N^%s Phi_%s(log_q N)" % (_fmt(t.exponent), _fmt(t.eigenvalue)) for t in self.terms]
        err = "O(N^%.14g" % self.error_exponent
        err += " (log N)^%d)" % self.error_log_power if self.error_log_power else ")"
        return " + ".join(parts + [err])


def _fmt(z):
    z = complex(z)
    if abs(z.imag) <= 1e-14 * max(1.0, abs(z.real)):
        return "%.15g" % z.real
    return "(%.15g%+.15gi)" % (z.real, z.imag)


def assemble_expansion(rep, R, spec=None, mu_max=10, cfg=None, check=False):
    """Main terms for all eigenvalues of modulus above R plus the error term.

    R may be a number or JsrBounds (then choose_R decides).
    """
    cfg = cfg or DirichletConfig()
    spec = spec or exact_spectrum(rep.sum_matrix())
    if not isinstance(R, (int, float)):
        R = choose_R(R, spec)
    growth = math.log(R) / math.log(rep.q) if R > 0 else -1.0
    tol = 1e-9 * max(1.0, R)
    eq = RepresentationEquation(rep, growth, cfg)
    sel = eq.ar.array(list(rep.selection))
    terms = []
    for e in spec.eigenvalues:
        if e.modulus <= R + tol:
            continue
        if e.jordan_size != 1:
            raise NotSimpleEigenvalue("eigenvalue %s has Jordan size %d" % (_fmt(e.value), e.jordan_size))
        real = abs(e.value.imag) < 1e-12 and e.value.real > 0
        mus = range(0, mu_max + 1) if real else _mus(mu_max)
        table = _table(eq, lambda v: sel.dot(v), e.value, mus, check, spec)
        if real:
            for mu in range(1, mu_max + 1):
                table.coefficients[-mu] = complex(table.coefficients[mu]).conjugate()
            table.mirrored = tuple(range(-mu_max, 0))
        terms.append(table)
    on_circle = [e.jordan_size for e in spec.eigenvalues if abs(e.modulus - R) <= tol]
    return AsymptoticExpansion(rep.q, R, growth, max(on_circle, default=0), terms)


def fluctuation_value(table, u, degree=None):
    """Partial Fourier sum sum_{|mu| <= degree} phi_mu e^{2 pi i mu u}."""
    total = 0j
    for mu, c in table.coefficients.items():
        if degree is None or abs(mu) <= degree:
            total += complex(c) * cmath.exp(2j * math.pi * mu * u)
    return total


def evaluate_expansion(expansion, N, fourier_degree=None):
    """Main terms at N; the real part is returned when the imaginary part vanishes."""
    L = math.log(N) / math.log(expansion.q)
    u = L - math.floor(L)
    total = 0j
    for t in expansion.terms:
        total += cmath.exp(complex(t.exponent) * math.log(N)) * fluctuation_value(t, u, fourier_degree)
    return total.real if abs(total.imag) <= 1e-9 * max(1.0, abs(total)) else total


def empirical_fluctuation(oracle, kappa, u_grid, q=2):
    """(u, X(floor(q^u)) / q^(kappa u)) with X the exact summatory function."""
    summatory = oracle.summatory if hasattr(oracle, "summatory") else oracle
    out = []
    for u in u_grid:
        N = math.floor(q ** u + 1e-9)
        out.append((u, float(Fraction(summatory(N))) / q ** (kappa * u)))
    return out
