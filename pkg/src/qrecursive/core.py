"""Definitions, exact oracles and linear representations.

A q-recursive definition fixes integers q >= 2, M > m >= 0, l <= u and an
offset n0 together with rational coefficients c[s, k] such that

    x(q**M * n + s) = sum_{l <= k <= u} c[s, k] * x(q**m * n + k)

for 0 <= s < q**M and n >= n0, plus enough initial values to start the
recursion.  Arguments below zero evaluate to 0 everywhere in this package.

A linear representation (A_0, ..., A_{q-1}, v0, selection) encodes a vector
sequence with v(q n + r) = A_r v(n); the scalar sequence is selection . v(n).
"""

from dataclasses import dataclass, field
from fractions import Fraction
import json
import re

from . import linalg as la


class QRecursiveError(Exception):
    """Base class for domain errors; the class name is the error code."""


class DefinitionError(QRecursiveError):
    pass


class OffsetTooSmall(DefinitionError):
    pass


class InconsistentInitialValues(DefinitionError):
    pass


class MissingCoefficient(DefinitionError):
    pass


class MissingInitialValues(DefinitionError):
    pass


class NotWellFounded(DefinitionError):
    pass


class RepresentationHasOffset(QRecursiveError):
    pass


class FormatError(QRecursiveError):
    pass


# ---------------------------------------------------------------- labels

@dataclass(frozen=True)
class Subsequence:
    """Component x(q**level * n + residue)."""
    level: int
    residue: int

    def __str__(self):
        return "x(q^%d n%+d)" % (self.level, self.residue) if self.residue else "x(q^%d n)" % self.level


@dataclass(frozen=True)
class Delta:
    """Indicator sequence n -> [n == index]."""
    index: int

    def __str__(self):
        return "delta_%d" % self.index


@dataclass(frozen=True)
class External:
    """Component `component` of the vector of a named auxiliary sequence at n + shift."""
    name: str
    shift: int
    component: int = 0

    def __str__(self):
        return "%s[%d](n%+d)" % (self.name, self.component, self.shift)


@dataclass(frozen=True)
class Combination:
    """Rational linear combination of other labels."""
    terms: tuple

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join("%s*%s" % (c, lab) for c, lab in self.terms)


def combine(pairs):
    """Build a flattened, canonical Combination from (coeff, label) pairs."""
    acc = {}
    order = []

    def add(c, lab):
        if isinstance(lab, Combination):
            for c2, lab2 in lab.terms:
                add(c * c2, lab2)
            return
        if lab not in acc:
            acc[lab] = Fraction(0)
            order.append(lab)
        acc[lab] += c

    for c, lab in pairs:
        if c:
            add(Fraction(c), lab)
    terms = tuple((acc[lab], lab) for lab in order if acc[lab])
    if len(terms) == 1 and terms[0][0] == 1:
        return terms[0][1]
    return Combination(terms)


# ---------------------------------------------------------------- definitions

@dataclass
class QRecursiveDefinition:
    q: int
    M: int
    m: int
    l: int
    u: int
    offset: int
    coefficients: dict           # (s, k) -> Fraction; absent entries are zero
    initial: tuple               # x(0), x(1), ...
    row_offsets: tuple = None    # optional per-residue start (each <= offset)
    inhomogeneities: dict = field(default_factory=dict)  # s -> LinearRepresentation
    name: str = ""

    def coeff(self, s, k):
        return self.coefficients.get((s, k), la.Q0)

    @property
    def qM(self):
        return self.q ** self.M

    @property
    def qm(self):
        return self.q ** self.m

    def row_offset(self, s):
        return self.offset if self.row_offsets is None else self.row_offsets[s]

    def initial_length(self):
        return self.qM * max(self.offset, 1)

    def is_homogeneous(self):
        return not self.inhomogeneities


def _ceil_div(a, b):
    return -((-a) // b)


def validate_definition(d):
    """Check a definition and return it with normalized (exact) fields."""
    q, M, m = d.q, d.M, d.m
    if q < 2 or not 0 <= m < M:
        raise DefinitionError("need q >= 2 and 0 <= m < M")
    if d.l > d.u:
        raise DefinitionError("need l <= u")
    if d.offset < 0:
        raise DefinitionError("offset must be non-negative")
    qM, qm = q ** M, q ** m
    coeffs = {}
    seen = set()
    for (s, k), c in d.coefficients.items():
        if not 0 <= s < qM:
            raise DefinitionError("residue %d outside [0, %d)" % (s, qM))
        if not d.l <= k <= d.u:
            raise DefinitionError("coefficient index %d outside [%d, %d]" % (k, d.l, d.u))
        seen.add(s)
        c = la.frac(c)
        if c:
            coeffs[(s, k)] = c
    missing = [s for s in range(qM) if s not in seen and s not in d.inhomogeneities]
    if missing:
        raise MissingCoefficient("no coefficients given for residue(s) %s" % missing)
    for s in seen:
        # an all-zero row keeps one explicit entry so that it stays "given"
        if not any(s2 == s for s2, _ in coeffs):
            coeffs[(s, d.l)] = la.Q0
    row_offsets = None
    if d.row_offsets is not None:
        row_offsets = tuple(int(x) for x in d.row_offsets)
        if len(row_offsets) != qM or any(not 0 <= x <= d.offset for x in row_offsets):
            raise DefinitionError("row offsets must be q^M values in [0, offset]")
    for s in range(qM):
        start = d.offset if row_offsets is None else row_offsets[s]
        ks = [k for k in range(d.l, d.u + 1) if coeffs.get((s, k))]
        if ks and qm * start + min(ks) < 0:
            raise OffsetTooSmall("q^m * n0 + l = %d < 0 for residue %d" % (qm * start + min(ks), s))
    if qm * d.offset + d.l < 0:
        raise OffsetTooSmall("q^m * n0 + l = %d < 0" % (qm * d.offset + d.l))
    for s, g in d.inhomogeneities.items():
        if not 0 <= s < qM:
            raise DefinitionError("inhomogeneity residue %d out of range" % s)
        if g.q != q or g.validity_offset != 0:
            raise DefinitionError("inhomogeneities must be q-regular with offset 0")
    init = tuple(la.frac(x) for x in d.initial)
    need = qM * max(d.offset, 1)
    if len(init) < need:
        raise MissingInitialValues("need initial values x(0..%d), got %d" % (need - 1, len(init)))
    out = QRecursiveDefinition(q, M, m, d.l, d.u, d.offset, coeffs, init, row_offsets,
                               dict(d.inhomogeneities), d.name)
    # the recursion must reach strictly smaller arguments beyond the initial range
    for (s, k), c in coeffs.items():
        if not c:
            continue
        a = max(_ceil_div(len(init) - s, qM), 0)
        if qm * a + k >= qM * a + s:
            raise NotWellFounded("x(%d n%+d) refers to x(%d n%+d) at n = %d" % (qM, s, qm, k, a))
    # consistency of initial values wherever the recurrence also applies
    for i in range(len(init)):
        n, s = divmod(i, qM)
        if n < out.row_offset(s):
            continue
        terms = [(c, qm * n + k) for (s2, k), c in coeffs.items() if s2 == s]
        if any(j >= len(init) for _, j in terms):
            continue
        rhs = sum((c * init[j] for c, j in terms if j >= 0), la.Q0)
        if s in out.inhomogeneities:
            rhs += rep_eval(out.inhomogeneities[s], n)
        if rhs != init[i]:
            raise InconsistentInitialValues(
                "x(%d) = %s but the recurrence gives %s" % (i, init[i], rhs))
    return out


class SequenceOracle:
    """Memoized exact evaluation of a q-recursive definition, x(n) = 0 for n < 0."""

    def __init__(self, definition, validate=True):
        d = validate_definition(definition) if validate else definition
        self.definition = d
        self.q = d.q
        self._rows = {}
        for (s, k), c in d.coefficients.items():
            self._rows.setdefault(s, []).append((k, c))
        integral = not d.inhomogeneities and \
            all(c.denominator == 1 for c in d.coefficients.values()) and \
            all(x.denominator == 1 for x in d.initial)
        conv = int if integral else Fraction
        for s in self._rows:
            self._rows[s] = [(k, conv(c)) for k, c in self._rows[s]]
        self._conv = conv
        self._values = [conv(x) for x in d.initial]
        self._ext = {"g%d" % s: g for s, g in d.inhomogeneities.items()}
        self._ext_cache = {}
        self._prefix = [0]

    def _extend(self, n):
        vals = self._values
        d = self.definition
        qM, qm = d.qM, d.qm
        rows = self._rows
        inh = d.inhomogeneities
        for i in range(len(vals), n + 1):
            a, s = divmod(i, qM)
            base = qm * a
            acc = 0
            for k, c in rows.get(s, ()):
                j = base + k
                if j >= 0:
                    acc += c * vals[j]
            if s in inh:
                g = self.external("g%d" % s, a)
                acc += sum((x * y for x, y in zip(inh[s].selection, g)), la.Q0)
            vals.append(acc)

    def __call__(self, n):
        if n < 0:
            return la.Q0
        if n >= len(self._values):
            self._extend(n)
        return Fraction(self._values[n])

    def values(self, n_max):
        """List x(0), ..., x(n_max) (ints when the definition is integral)."""
        if n_max >= len(self._values):
            self._extend(n_max)
        return self._values[:n_max + 1]

    def summatory(self, N):
        """sum_{0 <= n < N} x(n)."""
        if N <= 0:
            return la.Q0
        pre = self._prefix
        if N >= len(pre):
            vals = self.values(N - 1)
            acc = pre[-1]
            for i in range(len(pre) - 1, N):
                acc += vals[i]
                pre.append(acc)
        return Fraction(pre[N])

    def external(self, name, n):
        """Vector of the named auxiliary sequence at n (zero vector for n < 0)."""
        g = self._ext[name]
        if n < 0:
            return (la.Q0,) * g.dim
        key = (name, n)
        if key not in self._ext_cache:
            self._ext_cache[key] = rep_vector(g, n)
        return self._ext_cache[key]

    def label_value(self, label, n):
        if isinstance(label, Subsequence):
            return self(self.q ** label.level * n + label.residue)
        if isinstance(label, Delta):
            return la.Q1 if n == label.index else la.Q0
        if isinstance(label, External):
            return self.external(label.name, n + label.shift)[label.component]
        if isinstance(label, Combination):
            return sum((c * self.label_value(lab, n) for c, lab in label.terms), la.Q0)
        raise TypeError("unknown label %r" % (label,))

    def vector(self, labels, n):
        return tuple(self.label_value(lab, n) for lab in labels)


def oracle_eval(definition, n):
    return SequenceOracle(definition)(n)


def oracle_summatory(definition, N):
    return SequenceOracle(definition).summatory(N)


# ---------------------------------------------------------------- representations

@dataclass(frozen=True)
class LinearRepresentation:
    q: int
    matrices: tuple
    v0: tuple
    selection: tuple
    labels: tuple = None
    validity_offset: int = 0
    name: str = ""

    def __post_init__(self):
        mats = tuple(la.matrix(a) for a in self.matrices)
        object.__setattr__(self, "matrices", mats)
        object.__setattr__(self, "v0", la.vector(self.v0))
        object.__setattr__(self, "selection", la.vector(self.selection))
        D = len(self.v0)
        if len(mats) != self.q:
            raise ValueError("need exactly q matrices")
        for a in mats:
            if len(a) != D or any(len(row) != D for row in a):
                raise ValueError("matrix shape does not match dimension %d" % D)
        if len(self.selection) != D:
            raise ValueError("selection row has wrong length")
        if self.labels is None:
            object.__setattr__(self, "labels", tuple(Combination(()) for _ in range(D)))
        elif len(self.labels) != D:
            raise ValueError("need one label per component")
        else:
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def dim(self):
        return len(self.v0)

    def sum_matrix(self):
        """C = A_0 + ... + A_{q-1}."""
        c = la.zeros(self.dim, self.dim)
        for a in self.matrices:
            c = la.matadd(c, a)
        return c

    def sparse(self):
        cache = self.__dict__.get("_sparse")
        if cache is None:
            cache = [[[(j, x) for j, x in enumerate(row) if x] for row in a] for a in self.matrices]
            object.__setattr__(self, "_sparse", cache)
        return cache


def digits(n, q):
    """Base-q digits of n, least significant first (empty for n = 0)."""
    out = []
    while n:
        n, r = divmod(n, q)
        out.append(r)
    return out


def _spmv(rows, v):
    out = []
    for row in rows:
        acc = 0
        for j, x in row:
            y = v[j]
            if y:
                acc += x * y
        out.append(acc)
    return out


def rep_vector(rep, n):
    """A_{d0} ... A_{d_{L-1}} v0, the formal vector at n."""
    sp = rep.sparse()
    v = list(rep.v0)
    for r in reversed(digits(n, rep.q)):
        v = _spmv(sp[r], v)
    return tuple(Fraction(x) for x in v)


def rep_eval(rep, n):
    if rep.validity_offset > 0:
        raise RepresentationHasOffset(
            "representation only valid for n >= %d; correct the offset first" % rep.validity_offset)
    return la.dot(rep.selection, rep_vector(rep, n))


def rep_vectors(rep, n_max):
    """v(0), ..., v(n_max) by v(n) = A_{n mod q} v(n div q)."""
    sp = rep.sparse()
    q = rep.q
    out = [list(rep.v0)]
    for n in range(1, n_max + 1):
        out.append(_spmv(sp[n % q], out[n // q]))
    return out


def rep_values(rep, n_max):
    if rep.validity_offset > 0:
        raise RepresentationHasOffset("representation has offset %d" % rep.validity_offset)
    sel = [(j, x) for j, x in enumerate(rep.selection) if x]
    return [sum((x * v[j] for j, x in sel), la.Q0) for v in rep_vectors(rep, n_max)]


@dataclass
class CheckResult:
    ok: bool
    counterexample: int = None
    detail: str = ""

    def __bool__(self):
        return self.ok


def rep_check(rep, oracle, n_max, start=None):
    """Check v(q n + r) = A_r v(n) against label semantics for start <= n <= n_max.

    When the representation has no offset, also compare rep_eval with the
    oracle for 0 <= n <= n_max.
    """
    q = rep.q
    lo = rep.validity_offset if start is None else start
    sp = rep.sparse()
    cache = {}

    def vec(n):
        if n not in cache:
            cache[n] = oracle.vector(rep.labels, n)
        return cache[n]

    for n in range(lo, n_max + 1):
        v = vec(n)
        for r in range(q):
            lhs = vec(q * n + r)
            rhs = _spmv(sp[r], v)
            if any(a != b for a, b in zip(lhs, rhs)):
                return CheckResult(False, n, "v(%d n + %d) != A_%d v(n) at n = %d" % (q, r, r, n))
    if rep.validity_offset == 0:
        if tuple(vec(0)) != rep.v0:
            return CheckResult(False, 0, "v0 does not match the labels at n = 0")
        vals = rep_values(rep, n_max)
        for n, y in enumerate(vals):
            if y != oracle(n):
                return CheckResult(False, n, "rep_eval(%d) = %s but x(%d) = %s" % (n, y, n, oracle(n)))
    return CheckResult(True)


# ---------------------------------------------------------------- text formats

def format_rational(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else "%d/%d" % (x.numerator, x.denominator)


_RAT = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_rational(tok):
    if not _RAT.match(tok):
        raise FormatError("not an exact rational: %r (use integers or p/q)" % tok)
    return Fraction(tok)


def _strip(line):
    return line.split("#", 1)[0].strip()


def parse_definition(text):
    """Parse the definition text format (see README)."""
    fields = {}
    coeffs = {}
    initial = []
    row_offsets = None
    section = None
    name = ""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        head, colon, rest = line.partition(":")
        if colon and head.strip().lower() in ("coefficients", "initial", "row_offsets"):
            section = head.strip().lower()
            if section == "row_offsets":
                row_offsets = []
            line = rest.strip()
            if not line:
                continue
        if "=" in line and not line[0].isdigit() and not line[0] in "+-":
            key, val = (t.strip() for t in line.split("=", 1))
            if key == "name":
                name = val
            elif key in ("q", "M", "m", "l", "u", "offset"):
                try:
                    fields[key] = int(val)
                except ValueError:
                    raise FormatError("line %d: %s must be an integer" % (lineno, key))
            elif key in ("initial", "row_offsets"):
                toks = val.split()
                if key == "initial":
                    initial.extend(parse_rational(t) for t in toks)
                else:
                    row_offsets = [int(t) for t in toks]
                section = key
            else:
                raise FormatError("line %d: unknown field %r" % (lineno, key))
            continue
        toks = line.split()
        if section == "coefficients":
            if len(toks) != 3:
                raise FormatError("line %d: expected 's k value'" % lineno)
            try:
                s, k = int(toks[0]), int(toks[1])
            except ValueError:
                raise FormatError("line %d: residue and index must be integers" % lineno)
            if (s, k) in coeffs:
                raise FormatError("line %d: duplicate coefficient (%d, %d)" % (lineno, s, k))
            coeffs[(s, k)] = parse_rational(toks[2])
        elif section == "initial":
            initial.extend(parse_rational(t) for t in toks)
        elif section == "row_offsets":
            try:
                row_offsets.extend(int(t) for t in toks)
            except ValueError:
                raise FormatError("line %d: row offsets must be integers" % lineno)
        else:
            raise FormatError("line %d: unexpected content %r" % (lineno, line))
    for key in ("q", "M", "m", "l", "u"):
        if key not in fields:
            raise FormatError("missing field %r" % key)
    return QRecursiveDefinition(fields["q"], fields["M"], fields["m"], fields["l"], fields["u"],
                                fields.get("offset", 0), coeffs, tuple(initial),
                                tuple(row_offsets) if row_offsets is not None else None, name=name)


def format_definition(d):
    lines = []
    if d.name:
        lines.append("name = %s" % d.name)
    for key in ("q", "M", "m", "l", "u", "offset"):
        lines.append("%s = %d" % (key, getattr(d, key)))
    lines.append("coefficients:")
    for s in range(d.qM):
        row = [(k, d.coeff(s, k)) for k in range(d.l, d.u + 1)]
        for k, c in row:
            if c or all(not c2 for _, c2 in row) and k == d.l:
                lines.append("  %d %d %s" % (s, k, format_rational(c)))
    if d.row_offsets is not None:
        lines.append("row_offsets = " + " ".join(str(x) for x in d.row_offsets))
    lines.append("initial:")
    vals = [format_rational(x) for x in d.initial]
    for i in range(0, len(vals), 16):
        lines.append("  " + " ".join(vals[i:i + 16]))
    return "\n".join(lines) + "\n"


def load_definition(path):
    with open(path, encoding="utf-8") as fh:
        return parse_definition(fh.read())


def label_to_json(lab):
    if isinstance(lab, Subsequence):
        return {"kind": "subsequence", "level": lab.level, "residue": lab.residue}
    if isinstance(lab, Delta):
        return {"kind": "delta", "index": lab.index}
    if isinstance(lab, External):
        return {"kind": "external", "name": lab.name, "shift": lab.shift, "component": lab.component}
    return {"kind": "combination",
            "terms": [[format_rational(c), label_to_json(t)] for c, t in lab.terms]}


def label_from_json(obj):
    kind = obj["kind"]
    if kind == "subsequence":
        return Subsequence(obj["level"], obj["residue"])
    if kind == "delta":
        return Delta(obj["index"])
    if kind == "external":
        return External(obj["name"], obj["shift"], obj.get("component", 0))
    if kind == "combination":
        return Combination(tuple((parse_rational(c), label_from_json(t)) for c, t in obj["terms"]))
    raise FormatError("unknown label kind %r" % kind)


def _mat_json(a):
    return [[format_rational(x) for x in row] for row in a]


def rep_to_json(rep, definition=None):
    obj = {
        "q": rep.q,
        "dim": rep.dim,
        "name": rep.name,
        "validity_offset": rep.validity_offset,
        "matrices": [_mat_json(a) for a in rep.matrices],
        "v0": [format_rational(x) for x in rep.v0],
        "selection": [format_rational(x) for x in rep.selection],
        "labels": [label_to_json(lab) for lab in rep.labels],
    }
    if definition is not None:
        obj["definition"] = format_definition(definition)
    return obj


def rep_from_json(obj):
    """Return (representation, definition or None)."""
    try:
        rep = LinearRepresentation(
            q=obj["q"],
            matrices=[[[parse_rational(x) for x in row] for row in a] for a in obj["matrices"]],
            v0=[parse_rational(x) for x in obj["v0"]],
            selection=[parse_rational(x) for x in obj["selection"]],
            labels=[label_from_json(lab) for lab in obj["labels"]],
            validity_offset=obj.get("validity_offset", 0),
            name=obj.get("name", ""))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError("malformed representation: %s" % exc)
    d = parse_definition(obj["definition"]) if "definition" in obj else None
    return rep, d


def save_rep(path, rep, definition=None):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(rep_to_json(rep, definition), fh, indent=1)


def load_rep(path):
    with open(path, encoding="utf-8") as fh:
        return rep_from_json(json.load(fh))
