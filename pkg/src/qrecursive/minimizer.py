"""Exact minimization of linear representations.

First the representation is restricted to the row space spanned by the
selection row times all products A_w, then to the column space spanned by
A_w v0.  Both spaces are grown breadth first with exact elimination, and
the result has the least possible dimension.
"""

from dataclasses import dataclass

from . import linalg as la
from .core import LinearRepresentation, combine


@dataclass(frozen=True)
class MinimizationReport:
    input_dim: int
    output_dim: int
    forward_basis_size: int
    backward_basis_size: int


def _closure(start, step, q, n):
    basis = la.IncrementalBasis(n)
    todo = []
    if basis.add(start):
        todo.append(tuple(start))
    while todo:
        v = todo.pop(0)
        for r in range(q):
            w = step(v, r)
            if basis.add(w):
                todo.append(tuple(w))
    return basis.vectors


def _observable(rep):
    """Restrict to the span of selection . A_w; new components are P v(n)."""
    P = _closure(rep.selection, lambda v, r: la.vecmat(v, rep.matrices[r]), rep.q, rep.dim)
    mats = []
    for a in rep.matrices:
        images = [la.vecmat(p, a) for p in P]
        mats.append(tuple(la.coordinates(P, images)))
    sel = la.coordinates(P, [rep.selection])[0] if P else ()
    v0 = tuple(la.dot(p, rep.v0) for p in P)
    labels = tuple(combine(zip(p, rep.labels)) for p in P)
    return LinearRepresentation(rep.q, mats, v0, sel, labels, rep.validity_offset, rep.name), len(P)


def _reachable(rep):
    """Restrict to the span of A_w v0; new components are coordinates of v(n)."""
    B = _closure(rep.v0, lambda v, r: la.matvec(rep.matrices[r], v), rep.q, rep.dim)
    k = len(B)
    mats = []
    for a in rep.matrices:
        images = [la.matvec(a, b) for b in B]
        coords = la.coordinates(B, images)  # coords[i] = A b_i in basis B
        mats.append(la.transpose(coords, k) if k else ())
    v0 = la.coordinates(B, [rep.v0])[0] if B else ()
    sel = tuple(la.dot(rep.selection, b) for b in B)
    # a left inverse of the basis matrix gives the new components as combinations
    labels = ()
    if k:
        cols = la.transpose(B)            # dim x k
        red, piv = la.rref(B)             # pivots pick k independent coordinates
        sub = tuple(tuple(cols[p][i] for i in range(k)) for p in piv)
        inv = la.inverse(sub)             # k x k
        labels = tuple(combine((inv[i][t], rep.labels[piv[t]]) for t in range(k)) for i in range(k))
    return LinearRepresentation(rep.q, mats, v0, sel, labels, rep.validity_offset, rep.name), k


def minimize(rep):
    """Return (minimal representation, MinimizationReport)."""
    if rep.validity_offset:
        raise ValueError("minimize an offset-corrected representation")
    obs, nf = _observable(rep)
    out, nb = _reachable(obs)
    return out, MinimizationReport(rep.dim, out.dim, nf, nb)
