"""Exact linear algebra over the rationals.

Matrices are tuples of row tuples of ``Fraction``; vectors are tuples.
Everything here is plain Gaussian elimination, sized for the small
(dimension < 50) matrices that show up in linear representations.
"""

from fractions import Fraction

Q0 = Fraction(0)
Q1 = Fraction(1)


def frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("refusing to convert float %r to an exact rational" % x)
    return Fraction(x)


def matrix(rows):
    return tuple(tuple(frac(a) for a in row) for row in rows)


def vector(xs):
    return tuple(frac(a) for a in xs)


def zeros(r, c):
    return tuple((Q0,) * c for _ in range(r))


def identity(n):
    return tuple(tuple(Q1 if i == j else Q0 for j in range(n)) for i in range(n))


def transpose(a, ncols=None):
    if not a:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*a))


def matmul(a, b):
    bt = transpose(b)
    return tuple(tuple(sum((x * y for x, y in zip(row, col) if x and y), Q0) for col in bt)
                 for row in a)


def matvec(a, v):
    return tuple(sum((x * y for x, y in zip(row, v) if x and y), Q0) for row in a)


def vecmat(v, a):
    n = len(a[0]) if a else 0
    out = [Q0] * n
    for x, row in zip(v, a):
        if x:
            for j, y in enumerate(row):
                if y:
                    out[j] += x * y
    return tuple(out)


def matadd(a, b):
    return tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(a, b))


def matscale(c, a):
    return tuple(tuple(c * x for x in row) for row in a)


def dot(u, v):
    return sum((x * y for x, y in zip(u, v) if x and y), Q0)


def block(rows_of_blocks):
    """Assemble a matrix from a 2-d list of blocks (all blocks given explicitly)."""
    out = []
    for brow in rows_of_blocks:
        height = len(brow[0])
        for i in range(height):
            out.append(tuple(x for b in brow for x in b[i]))
    return tuple(out)


def rref(rows, ncols=None):
    """Reduced row echelon form. Returns (rows, pivot_columns)."""
    m = [list(r) for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        if piv != 1:
            m[r] = [x / piv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return [tuple(row) for row in m[:r]], pivots


def rank(rows):
    return len(rref(rows)[1])


def nullspace(a, ncols=None):
    """Basis of {x : a x = 0} as a list of vectors."""
    if ncols is None:
        ncols = len(a[0]) if a else 0
    red, piv = rref(a, ncols)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [Q0] * ncols
        x[f] = Q1
        for row, p in zip(red, piv):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def solve(a, b):
    """Solve a x = b for square invertible a; b may be a vector or a matrix."""
    n = len(a)
    is_vec = not isinstance(b[0], tuple)
    bm = [(x,) for x in b] if is_vec else b
    aug = [tuple(a[i]) + tuple(bm[i]) for i in range(n)]
    red, piv = rref(aug, n)
    if piv != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    sol = tuple(row[n:] for row in red)
    return tuple(r[0] for r in sol) if is_vec else sol


def inverse(a):
    return solve(a, identity(len(a)))


def coordinates(basis, vectors):
    """Coordinates of each vector with respect to independent ``basis`` vectors.

    Raises ValueError if some vector is not in the span.
    """
    k = len(basis)
    if k == 0:
        if any(any(v) for v in vectors):
            raise ValueError("vector not in span")
        return [() for _ in vectors]
    n = len(basis[0])
    cols = transpose(basis)  # n x k, columns are basis vectors
    out = []
    aug = [tuple(cols[i]) + tuple(v[i] for v in vectors) for i in range(n)]
    red, piv = rref(aug, k)
    if piv != list(range(k)):
        raise ValueError("basis vectors are dependent")
    for j in range(len(vectors)):
        x = tuple(red[i][k + j] for i in range(k))
        # rows beyond k must vanish for consistency
        out.append(x)
    for j, v in enumerate(vectors):
        back = tuple(sum((out[j][i] * basis[i][c] for i in range(k)), Q0) for c in range(n))
        if back != tuple(v):
            raise ValueError("vector not in span")
    return out


class IncrementalBasis:
    """Span of vectors added one at a time, with an echelon copy for membership tests."""

    def __init__(self, n):
        self.n = n
        self.vectors = []
        self._echelon = []  # (pivot, row) with row[pivot] == 1

    def reduce(self, v):
        v = list(v)
        for p, row in self._echelon:
            if v[p]:
                f = v[p]
                v = [x - f * y for x, y in zip(v, row)]
        return v

    def add(self, v):
        """Add v if independent; return True when the span grew."""
        w = self.reduce(v)
        p = next((i for i, x in enumerate(w) if x), None)
        if p is None:
            return False
        piv = w[p]
        w = [x / piv for x in w]
        self._echelon.append((p, w))
        self.vectors.append(tuple(v))
        return True

    def __len__(self):
        return len(self.vectors)


def char_poly(a):
    """Characteristic polynomial det(xI - a), coefficients from highest degree down.

    Faddeev-LeVerrier recursion; exact over the rationals.
    """
    n = len(a)
    coeffs = [Q1]
    m = zeros(n, n)
    ident = identity(n)
    for k in range(1, n + 1):
        m = matadd(matmul(a, m), matscale(coeffs[-1], ident))
        am = matmul(a, m)
        c = -sum((am[i][i] for i in range(n)), Q0) / k
        coeffs.append(c)
    return coeffs


def min_poly(a):
    """Minimal polynomial of a (monic, highest degree first)."""
    n = len(a)
    if n == 0:
        return [Q1]
    basis = IncrementalBasis(n * n)
    power = identity(n)
    powers = []
    while True:
        flat = tuple(x for row in power for x in row)
        if not basis.add(flat):
            # express flat in terms of earlier powers
            coords = coordinates([tuple(x for row in p for x in row) for p in powers], [flat])[0]
            return [Q1] + [-c for c in reversed(coords)]
        powers.append(power)
        power = matmul(a, power)


def to_float(a):
    import numpy as np
    if not a:
        return np.zeros((0, 0))
    return np.array([[float(x) for x in row] for row in a], dtype=float)
