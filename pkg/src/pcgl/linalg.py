"""Exact linear algebra over the rationals (dense, desk scale)."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

Matrix = List[List[Fraction]]


def _to_fraction_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def rank(rows: Sequence[Sequence]) -> int:
    m = _to_fraction_matrix(rows)
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, nrows) if m[i][col]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][col]
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == nrows:
            break
    return r


def solve(rows: Sequence[Sequence], rhs: Sequence) -> Tuple[Optional[List[Fraction]], List[List[Fraction]]]:
    """Solve rows*x = rhs exactly.

    Returns (particular_solution, nullspace_basis); the particular solution is
    None when the system is inconsistent.  The nullspace basis is that of the
    homogeneous system regardless.
    """
    a = _to_fraction_matrix(rows)
    b = [Fraction(x) for x in rhs]
    if len(a) != len(b):
        raise ValueError("rhs length mismatch")
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    aug = [a[i] + [b[i]] for i in range(nrows)]

    pivots: List[int] = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, nrows) if aug[i][col]), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = 1 / aug[r][col]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(nrows):
            if i != r and aug[i][col]:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
        if r == nrows:
            break

    consistent = all(aug[i][ncols] == 0 for i in range(r, nrows))
    particular: Optional[List[Fraction]] = None
    if consistent:
        particular = [Fraction(0)] * ncols
        for i, col in enumerate(pivots):
            particular[col] = aug[i][ncols]

    free_cols = [c for c in range(ncols) if c not in pivots]
    null_basis: List[List[Fraction]] = []
    for fc in free_cols:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for i, col in enumerate(pivots):
            vec[col] = -aug[i][fc]
        null_basis.append(vec)
    return particular, null_basis
