"""Exact linear algebra over the Gaussian rationals.

Vectors are sparse dicts ``index -> GaussianRational``.  Two independent
rank routines are provided: sparse elimination over the field, and
fraction-free (Bareiss) elimination over the Gaussian integers for dense
matrices.  Pivoting is deterministic: the first nonzero entry in column
order.
"""

from __future__ import annotations

from math import lcm
from typing import Dict, Iterable, List, Sequence

import numpy as np

from .coeff import GaussianRational, ZERO

Vec = Dict[int, GaussianRational]

__all__ = [
    "Echelon",
    "rank",
    "rank_bareiss",
    "det",
    "nullspace",
    "complement",
    "compose_columns",
    "dense",
    "numeric_rank",
]


def _axpy(y: Vec, a: GaussianRational, x: Vec) -> Vec:
    """``y + a x`` as a new dict with zeros dropped."""
    out = dict(y)
    for i, v in x.items():
        w = out.get(i, ZERO) + a * v
        if w:
            out[i] = w
        else:
            out.pop(i, None)
    return out


class Echelon:
    """Incrementally built reduced basis; each stored vector has a distinct pivot with value 1."""

    def __init__(self):
        self.rows: Dict[int, Vec] = {}

    def reduce(self, v: Vec) -> Vec:
        # stored rows vanish at each other's pivots, so one pass suffices
        v = {i: c for i, c in v.items() if c}
        for p in [p for p in v if p in self.rows]:
            c = v.get(p)
            if c:
                v = _axpy(v, -c, self.rows[p])
        return v

    def add(self, v: Vec) -> bool:
        """Insert ``v``; return whether it was independent of the current span."""
        r = self.reduce(v)
        if not r:
            return False
        p = min(r)
        inv = r[p].inverse()
        r = {i: c * inv for i, c in r.items()}
        for q, row in list(self.rows.items()):
            if p in row:
                self.rows[q] = _axpy(row, -row[p], r)
        self.rows[p] = r
        return True

    def contains(self, v: Vec) -> bool:
        return not self.reduce(v)

    def __len__(self) -> int:
        return len(self.rows)


def rank(vectors: Iterable[Vec]) -> int:
    e = Echelon()
    for v in vectors:
        e.add(v)
    return len(e)


def dense(vectors: Sequence[Vec], length: int) -> List[List[GaussianRational]]:
    return [[v.get(i, ZERO) for i in range(length)] for v in vectors]


def _clear_denominators(row: Sequence[GaussianRational]) -> List[GaussianRational]:
    m = 1
    for c in row:
        m = lcm(m, c.re.denominator, c.im.denominator)
    return [c * m for c in row]


def rank_bareiss(matrix: Sequence[Sequence[GaussianRational]]) -> int:
    """Rank by fraction-free elimination; every intermediate entry stays a Gaussian integer."""
    a = [_clear_denominators(list(r)) for r in matrix if any(r)]
    if not a:
        return 0
    rows, cols = len(a), len(a[0])
    r = 0
    prev = GaussianRational(1)
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                q = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) / prev
                assert q.is_gaussian_integer(), "Bareiss step left the Gaussian integers"
                a[i][j] = q
            a[i][c] = ZERO
        prev = a[r][c]
        r += 1
        if r == rows:
            break
    return r


def det(matrix: Sequence[Sequence[GaussianRational]]) -> GaussianRational:
    """Determinant of a square matrix by field elimination."""
    a = [list(r) for r in matrix]
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("det needs a square matrix")
    out = GaussianRational(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            return ZERO
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            out = -out
        out = out * a[c][c]
        inv = a[c][c].inverse()
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] * inv
                for j in range(c, n):
                    a[i][j] = a[i][j] - f * a[c][j]
    return out


def nullspace(columns: Sequence[Vec]) -> List[Vec]:
    """Basis of ``{x : sum_j x_j columns[j] = 0}``, as sparse vectors over the column indices."""
    # eliminate on the columns augmented with an identity tag
    tag = max((max(c) for c in columns if c), default=-1) + 1
    e = Echelon()
    kernel: List[Vec] = []
    for j, col in enumerate(columns):
        v = dict(col)
        v[tag + j] = GaussianRational(1)
        r = e.reduce(v)
        if r and min(r) < tag:
            e.add(r)
        else:
            kernel.append({i - tag: c for i, c in r.items()})
    return kernel


def complement(sub: Sequence[Vec], ambient: Sequence[Vec]) -> List[Vec]:
    """Vectors of ``ambient`` that extend a basis of ``span(sub)`` to one of ``span(sub + ambient)``."""
    e = Echelon()
    for v in sub:
        e.add(v)
    return [v for v in ambient if e.add(v)]


def compose_columns(outer: Sequence[Vec], inner: Sequence[Vec]) -> List[Vec]:
    """Columns of ``outer @ inner`` where both are given by their columns."""
    out = []
    for col in inner:
        acc: Vec = {}
        for j, c in col.items():
            acc = _axpy(acc, c, outer[j])
        out.append(acc)
    return out


def numeric_rank(matrix, tol: float = 1e-9) -> int:
    a = np.asarray(matrix, dtype=float)
    if a.size == 0:
        return 0
    return int(np.linalg.matrix_rank(a, tol=tol))
