"""Linear representations from q-recursive definitions.

The general construction stacks the blocks

    v_j = (x(q**j n + d))_d    for 0 <= j < M,

with d in [0, q**j) below level m and d in [l', q**j - q**m + u'] from
level m on.  Rows of level j <= M - 2 just move to the next level; rows of
level M - 1 use the recurrence to fall back to level m.  The resulting
representation is valid from n1 on; `correct_offset` appends indicator
components to make it valid for all n >= 0.
"""

from dataclasses import dataclass
from fractions import Fraction
import re

from . import linalg as la
from .core import (
    Combination, Delta, External, LinearRepresentation, QRecursiveError, SequenceOracle,
    Subsequence, combine, validate_definition, _ceil_div,
)


class IndexRangeViolation(QRecursiveError):
    pass


class SpecialCaseViolation(QRecursiveError):
    pass


class Underdetermined(QRecursiveError):
    pass


class Inconsistent(QRecursiveError):
    pass


@dataclass(frozen=True)
class ShiftBounds:
    l_prime: int
    u_prime: int
    n1: int


def shift_bounds(q, M, m, l, u, n0):
    """Index range [l', u'] closed under the construction and the offset n1."""
    p = q ** (M - m)
    lp = (((l + 1) * p - q ** M) // (p - 1)) if l < 0 else 0
    up = q ** m - 1 + (_ceil_div(u * p, p - 1) if u > 0 else 0)
    n1 = n0 - lp // q ** M
    return ShiftBounds(lp, up, n1)


class _Layout:
    """Component layout of the general construction."""

    def __init__(self, q, M, m, lp, up):
        self.q, self.M, self.m = q, M, m
        self.ranges = []
        for j in range(M):
            lo, hi = (0, q ** j - 1) if j < m else (lp, q ** j - q ** m + up)
            self.ranges.append((lo, hi))
        self.start = []
        pos = 0
        for lo, hi in self.ranges:
            self.start.append(pos)
            pos += hi - lo + 1
        self.dim = pos

    def index(self, j, d):
        lo, hi = self.ranges[j]
        if not lo <= d <= hi:
            raise IndexRangeViolation("component (%d, %d) outside [%d, %d]" % (j, d, lo, hi))
        return self.start[j] + d - lo

    def components(self):
        for j, (lo, hi) in enumerate(self.ranges):
            for d in range(lo, hi + 1):
                yield j, d


def _general_rows(d, layout, extra=None):
    """Matrices of the general construction (dense lists), optional coupling hook."""
    q, M, m = d.q, d.M, d.m
    qM, qm = d.qM, d.qm
    D = layout.dim if extra is None else extra.dim
    mats = [[[la.Q0] * D for _ in range(D)] for _ in range(q)]
    for r in range(q):
        a = mats[r]
        for j, dd in layout.components():
            row = a[layout.index(j, dd)]
            if j <= M - 2:
                row[layout.index(j + 1, q ** j * r + dd)] = la.Q1
                continue
            dp, rp = divmod(dd, qM)
            rt = q ** (M - 1) * r + rp
            if rt < qM:
                s, base, shift = rt, qm * dp, dp
            else:
                s, base, shift = rt - qM, qm * dp + qm, dp + 1
            for k in range(d.l, d.u + 1):
                c = d.coeff(s, k)
                if c:
                    row[layout.index(m, base + k)] += c
            if extra is not None:
                extra.couple(row, s, shift)
    return mats


def build_general(definition, oracle=None):
    """Representation of a homogeneous definition, valid for n >= n1."""
    d = validate_definition(definition)
    if not d.is_homogeneous():
        raise ValueError("definition has inhomogeneities; use build_inhomogeneous")
    sb = shift_bounds(d.q, d.M, d.m, d.l, d.u, d.offset)
    layout = _Layout(d.q, d.M, d.m, sb.l_prime, sb.u_prime)
    mats = _general_rows(d, layout)
    labels = [Subsequence(j, dd) for j, dd in layout.components()]
    oracle = oracle or SequenceOracle(d, validate=False)
    v0 = oracle.vector(labels, 0)
    sel = [la.Q0] * layout.dim
    sel[layout.index(0, 0)] = la.Q1
    return LinearRepresentation(d.q, mats, v0, sel, labels, sb.n1, d.name)


def correct_offset(rep, oracle):
    """Append indicator components so that the representation holds for all n >= 0."""
    n0 = rep.validity_offset
    if n0 == 0:
        return rep
    q, D = rep.q, rep.dim
    vec = lambda n: oracle.vector(rep.labels, n)
    mats = []
    for r, a in enumerate(rep.matrices):
        w_cols = []
        for k in range(n0):
            lhs = vec(q * k + r)
            rhs = la.matvec(a, vec(k))
            w_cols.append([x - y for x, y in zip(lhs, rhs)])
        rows = []
        for i in range(D):
            rows.append(tuple(a[i]) + tuple(w_cols[k][i] for k in range(n0)))
        for k in range(n0):
            rows.append((la.Q0,) * D + tuple(la.Q1 if j * q == k - r else la.Q0 for j in range(n0)))
        mats.append(rows)
    v0 = tuple(vec(0)) + (la.Q1,) + (la.Q0,) * (n0 - 1)
    sel = tuple(rep.selection) + (la.Q0,) * n0
    labels = tuple(rep.labels) + tuple(Delta(k) for k in range(n0))
    return LinearRepresentation(q, mats, v0, sel, labels, 0, rep.name)


def is_special_case(d):
    return d.M == d.m + 1 and d.l == 0 and d.u == d.qm - 1


def build_special(definition, oracle=None):
    """Smaller representation for M = m + 1, l = 0, u = q**m - 1, valid from n0 on."""
    d = validate_definition(definition)
    if not is_special_case(d):
        raise SpecialCaseViolation("need M = m + 1, l = 0 and u = q^m - 1")
    if not d.is_homogeneous():
        raise SpecialCaseViolation("inhomogeneous definitions are not covered")
    q, m, qm = d.q, d.m, d.qm
    layout = _Layout(q, m + 1, m, 0, qm - 1)
    # blocks 0..m, each with d in [0, q**j)
    layout.ranges = [(0, q ** j - 1) for j in range(m + 1)]
    layout.start = [(q ** j - 1) // (q - 1) for j in range(m + 1)]
    layout.dim = (q ** (m + 1) - 1) // (q - 1)
    D = layout.dim
    mats = []
    for r in range(q):
        a = [[la.Q0] * D for _ in range(D)]
        for j, dd in layout.components():
            row = a[layout.index(j, dd)]
            if j < m:
                row[layout.index(j + 1, q ** j * r + dd)] = la.Q1
            else:
                for k in range(qm):
                    row[layout.index(m, k)] = d.coeff(r * qm + dd, k)
        mats.append(a)
    labels = [Subsequence(j, dd) for j, dd in layout.components()]
    oracle = oracle or SequenceOracle(d, validate=False)
    v0 = oracle.vector(labels, 0)
    sel = [la.Q0] * D
    sel[0] = la.Q1
    return LinearRepresentation(q, mats, v0, sel, labels, d.offset, d.name)


def special_blocks(rep, m):
    """The matrices B_r (lower right q**m x q**m blocks) of a special-case representation."""
    qm = rep.q ** m
    return [tuple(tuple(row[-qm:]) for row in a[-qm:]) for a in rep.matrices]


# ---------------------------------------------------------------- windows and shifts

def window_matrices(rep, lo, hi):
    """Matrices and start vector for (v(n + e))_{lo <= e <= hi}, v(negative) = 0.

    Needs lo <= 0 <= hi and an offset-free representation.
    """
    if not lo <= 0 <= hi:
        raise ValueError("window must contain 0")
    if rep.validity_offset:
        raise ValueError("window needs a representation without offset")
    q, D = rep.q, rep.dim
    width = hi - lo + 1
    mats = []
    for r in range(q):
        rows = []
        for e in range(lo, hi + 1):
            t, rho = divmod(r + e, q)
            a = rep.matrices[rho]
            for i in range(D):
                row = [la.Q0] * (D * width)
                off = (t - lo) * D
                row[off:off + D] = a[i]
                rows.append(row)
        mats.append(rows)
    from .core import rep_vector
    v0 = []
    for e in range(lo, hi + 1):
        v0.extend(rep_vector(rep, e) if e >= 0 else (la.Q0,) * D)
    return mats, v0


def shift_label(label, q, e=1):
    """Label of n -> label(n + e)."""
    if isinstance(label, Subsequence):
        return Subsequence(label.level, label.residue + q ** label.level * e)
    if isinstance(label, Delta):
        k = label.index - e
        return Delta(k) if k >= 0 else Combination(())
    if isinstance(label, External):
        return External(label.name, label.shift + e, label.component)
    if isinstance(label, Combination):
        return combine((c, shift_label(t, q, e)) for c, t in label.terms)
    raise TypeError(label)


def shift_representation(rep, d):
    """Representation of n -> x(n + d), by d one-step windows each followed by minimization."""
    from .minimizer import minimize
    if d < 0:
        raise ValueError("shift must be non-negative")
    for _ in range(d):
        mats, v0 = window_matrices(rep, 0, 1)
        D = rep.dim
        sel = (la.Q0,) * D + tuple(rep.selection)
        labels = tuple(rep.labels) + tuple(shift_label(lab, rep.q) for lab in rep.labels)
        rep = minimize(LinearRepresentation(rep.q, mats, v0, sel, labels, 0, rep.name))[0]
    return rep


# ---------------------------------------------------------------- inhomogeneous

class _Couplings:
    """Appends shifted windows of the inhomogeneities after the general blocks."""

    def __init__(self, d, base_dim, lo, hi):
        self.lo, self.hi = lo, hi
        self.d = d
        self.offsets = {}
        pos = base_dim
        for s in sorted(d.inhomogeneities):
            self.offsets[s] = pos
            pos += d.inhomogeneities[s].dim * (hi - lo + 1)
        self.dim = pos

    def couple(self, row, s, shift):
        g = self.d.inhomogeneities.get(s)
        if g is None:
            return
        if not self.lo <= shift <= self.hi:
            raise IndexRangeViolation("shift %d outside [%d, %d]" % (shift, self.lo, self.hi))
        off = self.offsets[s] + (shift - self.lo) * g.dim
        for i, x in enumerate(g.selection):
            if x:
                row[off + i] += x


def build_inhomogeneous(definition, oracle=None):
    """Offset-corrected representation of x(q^M n + s) = sum c x(q^m n + k) + g_s(n)."""
    d = validate_definition(definition)
    q, M, m = d.q, d.M, d.m
    qM = d.qM
    sb = shift_bounds(q, M, m, d.l, d.u, d.offset)
    layout = _Layout(q, M, m, sb.l_prime, sb.u_prime)
    lo = min(sb.l_prime // qM, 0)
    hi = (q ** (M - 1) - q ** m + sb.u_prime) // qM + 1
    extra = _Couplings(d, layout.dim, lo, hi)
    mats = _general_rows(d, layout, extra)
    labels = [Subsequence(j, dd) for j, dd in layout.components()]
    oracle = oracle or SequenceOracle(d, validate=False)
    v0 = list(oracle.vector(labels, 0))
    for s in sorted(d.inhomogeneities):
        g = d.inhomogeneities[s]
        gm, gv = window_matrices(g, lo, hi)
        off = extra.offsets[s]
        size = len(gv)
        for r in range(q):
            for i in range(size):
                mats[r][off + i][off:off + size] = gm[r][i]
        v0.extend(gv)
        labels.extend(External("g%d" % s, e, i) for e in range(lo, hi + 1) for i in range(g.dim))
    sel = [la.Q0] * extra.dim
    sel[layout.index(0, 0)] = la.Q1
    rep = LinearRepresentation(q, mats, v0, sel, labels, sb.n1, d.name)
    return correct_offset(rep, oracle)


def build(definition, special=False, correct=True, oracle=None):
    """Representation of any supported definition, offset-corrected unless correct=False."""
    d = validate_definition(definition)
    oracle = oracle or SequenceOracle(d, validate=False)
    if not d.is_homogeneous():
        return build_inhomogeneous(d, oracle)
    rep = build_special(d, oracle) if special else build_general(d, oracle)
    return correct_offset(rep, oracle) if correct else rep


# ---------------------------------------------------------------- identities

@dataclass(frozen=True)
class RecurrenceIdentity:
    """sum coeff * x(q**level * n + residue) = 0 for all n >= start."""
    terms: tuple   # (coeff, level, residue)
    start: int = 0

    def levels(self):
        return {j for _, j, _ in self.terms}

    def substitute(self, q, r):
        """The identity with n replaced by q n + r."""
        terms = tuple((c, j + 1, q ** j * r + d) for c, j, d in self.terms)
        return RecurrenceIdentity(terms, max(_ceil_div(self.start - r, q), 0))


def identity(lhs, rhs, start=0):
    """Identity x(lhs) = sum of rhs terms; lhs is (level, residue), rhs (coeff, level, residue)."""
    terms = ((Fraction(1),) + tuple(lhs),) + tuple((-Fraction(c), j, d) for c, j, d in rhs)
    return RecurrenceIdentity(terms, start)


def identity_closure(identities, q, M):
    seen = []
    keys = set()
    todo = list(identities)
    while todo:
        ide = todo.pop(0)
        key = (tuple(sorted(ide.terms)), ide.start)
        if key in keys:
            continue
        keys.add(key)
        seen.append(ide)
        if max(ide.levels()) < M:
            todo.extend(ide.substitute(q, r) for r in range(q))
    return seen


def disentangle(identities, q, M, m, initial=None, name=""):
    """Solve a system of identities for x(q^M n + s) in terms of level-m values.

    Returns a QRecursiveDefinition; it is validated when initial values are given.
    """
    from .core import QRecursiveDefinition
    closure = identity_closure(identities, q, M)
    symbols = sorted({(j, d) for ide in closure for _, j, d in ide.terms})
    targets = [(M, s) for s in range(q ** M)]
    keep = sorted(sym for sym in symbols if sym[0] == m)
    other = [sym for sym in symbols if sym not in targets and sym not in keep]
    cols = other + targets + keep
    col = {sym: i for i, sym in enumerate(cols)}
    nid = len(closure)
    rows = []
    for i, ide in enumerate(closure):
        row = [la.Q0] * (len(cols) + nid)
        for c, j, d in ide.terms:
            row[col[(j, d)]] += Fraction(c)
        row[len(cols) + i] = la.Q1
        rows.append(row)
    ncols = len(other) + len(targets)  # pivot only on eliminated symbols and targets
    red, piv = la.rref(rows, ncols)
    coeffs = {}
    row_offsets = []
    for s, t in enumerate(targets):
        ci = col.get(t)
        if ci is None or ci not in piv:
            raise Underdetermined("x(%d n + %d) is not determined by the identities" % (q ** M, s))
        row = red[piv.index(ci)]
        for t2 in targets:
            if t2 != t and row[col[t2]]:
                raise Underdetermined("x(%d n + %d) depends on another target" % (q ** M, s))
        if any(row[col[sym]] for sym in other):
            raise Underdetermined("cannot eliminate auxiliary values for residue %d" % s)
        for j, d in keep:
            c = row[col[(j, d)]]
            if c:
                coeffs[(s, d)] = -c
        used = [closure[i].start for i in range(nid) if row[len(cols) + i]]
        row_offsets.append(max(used))
    ks = [k for _, k in coeffs] or [0]
    l, u = min(ks), max(ks)
    qm = q ** m
    for s in range(q ** M):
        lowest = min([k for (s2, k) in coeffs if s2 == s] or [0])
        row_offsets[s] = max(row_offsets[s], _ceil_div(-lowest, qm))
        coeffs.setdefault((s, l), la.Q0)
    row_offsets = tuple(row_offsets)
    n0 = max(row_offsets)
    d = QRecursiveDefinition(q, M, m, l, u, n0, coeffs, tuple(initial or ()),
                             row_offsets if any(x != n0 for x in row_offsets) else None, name=name)
    if initial is None:
        return d
    _check_identities(closure, q, d.initial)
    return validate_definition(d)


def _check_identities(closure, q, init):
    for ide in closure:
        n = ide.start
        while True:
            args = [(c, q ** j * n + d) for c, j, d in ide.terms]
            if max(a for _, a in args) >= len(init):
                break
            val = sum((c * init[a] for c, a in args if a >= 0), la.Q0)
            if val:
                raise Inconsistent("initial values violate an identity at n = %d" % n)
            n += 1


class IdentityOracle:
    """Evaluate a sequence directly from identities with a unique highest term."""

    def __init__(self, identities, q, initial):
        self.q = q
        self.values = [Fraction(x) for x in initial]
        self.rules = []
        for ide in identities:
            top = max(j for _, j, _ in ide.terms)
            heads = [t for t in ide.terms if t[1] == top]
            if len(heads) != 1:
                raise ValueError("identity needs a unique highest-level term")
            c, j, d = heads[0]
            rest = [t for t in ide.terms if t is not heads[0]]
            self.rules.append((j, d, c, rest, ide.start))

    def __call__(self, n):
        if n < 0:
            return la.Q0
        vals = self.values
        q = self.q
        while len(vals) <= n:
            i = len(vals)
            for j, d, c, rest, start in self.rules:
                a, rem = divmod(i - d, q ** j)
                if rem or a < start:
                    continue
                args = [(c2, q ** j2 * a + d2) for c2, j2, d2 in rest]
                if any(x >= i for _, x in args):
                    continue
                vals.append(-sum((c2 * vals[x] for c2, x in args if x >= 0), la.Q0) / c)
                break
            else:
                raise Underdetermined("no identity determines x(%d)" % i)
        return vals[n]


# ---------------------------------------------------------------- identity files

@dataclass
class IdentitySystem:
    q: int
    M: int
    m: int
    identities: tuple
    initial: tuple = None
    name: str = ""

    def solve(self):
        return disentangle(self.identities, self.q, self.M, self.m, self.initial, self.name)


_IDENTITY_HEAD = re.compile(r"^identity(?:\s+start\s*=\s*(\d+))?\s*:$")


def parse_identities(text):
    """Identity file: fields q, M, m (and name), blocks 'identity start=N:' of rows
    'coeff level residue' whose terms sum to zero, and an optional initial list."""
    from .core import FormatError, parse_rational, _strip
    fields, name, initial = {}, "", None
    identities, current, section = [], None, None

    def close():
        if current is not None:
            if not current[1]:
                raise FormatError("identity without terms")
            identities.append(RecurrenceIdentity(tuple(current[1]), current[0]))

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        head = _IDENTITY_HEAD.match(line)
        if head:
            close()
            current = (int(head.group(1) or 0), [])
            section = "identity"
            continue
        if line == "initial:":
            close()
            current, section, initial = None, "initial", list(initial or [])
            continue
        if "=" in line and line[0].isalpha():
            key, val = (t.strip() for t in line.split("=", 1))
            if key == "name":
                name = val
            elif key in ("q", "M", "m"):
                try:
                    fields[key] = int(val)
                except ValueError:
                    raise FormatError("line %d: %s must be an integer" % (lineno, key))
            elif key == "initial":
                close()
                current, section = None, "initial"
                initial = [parse_rational(t) for t in val.split()]
            else:
                raise FormatError("line %d: unknown field %r" % (lineno, key))
            continue
        toks = line.split()
        if section == "identity":
            if len(toks) != 3:
                raise FormatError("line %d: expected 'coeff level residue'" % lineno)
            current[1].append((parse_rational(toks[0]), int(toks[1]), int(toks[2])))
        elif section == "initial":
            initial.extend(parse_rational(t) for t in toks)
        else:
            raise FormatError("line %d: unexpected content %r" % (lineno, line))
    close()
    for key in ("q", "M", "m"):
        if key not in fields:
            raise FormatError("missing field %r" % key)
    if not identities:
        raise FormatError("no identities given")
    return IdentitySystem(fields["q"], fields["M"], fields["m"], tuple(identities),
                          tuple(initial) if initial is not None else None, name)


def format_identities(system):
    from .core import format_rational
    lines = ["name = %s" % system.name] if system.name else []
    lines += ["q = %d" % system.q, "M = %d" % system.M, "m = %d" % system.m]
    for ide in system.identities:
        lines.append("identity start=%d:" % ide.start)
        lines += ["  %s %d %d" % (format_rational(c), j, d) for c, j, d in ide.terms]
    if system.initial is not None:
        lines.append("initial:")
        vals = [format_rational(x) for x in system.initial]
        for i in range(0, len(vals), 16):
            lines.append("  " + " ".join(vals[i:i + 16]))
    return "\n".join(lines) + "\n"


def load_identities(path):
    with open(path, encoding="utf-8") as fh:
        return parse_identities(fh.read())
