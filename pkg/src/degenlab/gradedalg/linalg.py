"""Exact linear algebra over the rationals.

Rank computations clear denominators row by row and run the guarded int64
kernels; if entries are already too large, or the guard trips mid-run, the
same fraction-free elimination is repeated with Python integers, which
cannot overflow.  Reduced row echelon forms (used for graded-piece bases
and membership tests) stay in Fraction arithmetic: they are small and their
output must be canonical.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

import numpy as np

from .kernels import GUARD, rank_int64

Row = list[Fraction]


def _int_rows(rows) -> list[list[int]]:
    """Scale each row to coprime integers (rank is invariant under row scaling)."""
    out = []
    for row in rows:
        dens = [c.denominator for c in row if isinstance(c, Fraction)]
        m = lcm(*dens) if dens else 1
        ints = [int(c * m) if isinstance(c, Fraction) else int(c) * m for c in row]
        g = 0
        for v in ints:
            g = gcd(g, v)
        if g > 1:
            ints = [v // g for v in ints]
        out.append(ints)
    return out


def _rank_python(rows: list[list[int]]) -> int:
    """Bareiss over arbitrary-precision integers."""
    m = len(rows)
    if m == 0:
        return 0
    n = len(rows[0])
    rank = 0
    prev = 1
    for col in range(n):
        if rank == m:
            break
        piv = -1
        for r in range(rank, m):
            if rows[r][col] != 0:
                piv = r
                break
        if piv < 0:
            continue
        if piv != rank:
            rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][col]
        for r in range(rank + 1, m):
            f = rows[r][col]
            if f == 0 and p == prev:
                continue
            rr = rows[r]
            pr = rows[rank]
            for c in range(col + 1, n):
                rr[c] = (rr[c] * p - f * pr[c]) // prev
            rr[col] = 0
        prev = p
        rank += 1
    return rank


def rank_rows(rows) -> int:
    """Exact rank of a matrix given as a list of rows (Fraction or int entries)."""
    rows = [r for r in rows if any(c != 0 for c in r)]
    if not rows:
        return 0
    ints = _int_rows(rows)
    if max(abs(v) for row in ints for v in row) < GUARD:
        a = np.array(ints, dtype=np.int64)
        r = rank_int64(a)
        if r >= 0:
            return r
    return _rank_python(ints)


def rank_columns(cols) -> int:
    return rank_rows(cols)  # rank(A) == rank(A^T)


def rref(rows) -> tuple[list[int], list[Row]]:
    """Reduced row echelon form over Q.

    Returns (pivot column indices, nonzero reduced rows); pivots are 1 and
    are the only nonzero entries in their columns.  Deterministic.
    """
    work = [[Fraction(c) for c in row] for row in rows]
    m = len(work)
    n = len(work[0]) if m else 0
    pivots: list[int] = []
    rank = 0
    for col in range(n):
        piv = -1
        for r in range(rank, m):
            if work[r][col] != 0:
                piv = r
                break
        if piv < 0:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        p = work[rank][col]
        if p != 1:
            work[rank] = [c / p for c in work[rank]]
        for r in range(m):
            if r != rank and work[r][col] != 0:
                f = work[r][col]
                work[r] = [a - f * b for a, b in zip(work[r], work[rank])]
        pivots.append(col)
        rank += 1
        if rank == m:
            break
    return pivots, work[:rank]


def reduce_mod(vec, pivots: list[int], rows: list[Row]) -> Row:
    """Residual of vec after reduction against an rref basis."""
    out = [Fraction(c) for c in vec]
    for p, row in zip(pivots, rows):
        f = out[p]
        if f != 0:
            out = [a - f * b for a, b in zip(out, row)]
    return out


def in_span(vec, pivots: list[int], rows: list[Row]) -> bool:
    return all(c == 0 for c in reduce_mod(vec, pivots, rows))


def nullspace(rows) -> list[Row]:
    """Basis of the right kernel of the matrix, deterministic order."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    pivots, red = rref(rows)
    pivset = set(pivots)
    basis = []
    for free in range(n):
        if free in pivset:
            continue
        v = [Fraction(0)] * n
        v[free] = Fraction(1)
        for p, row in zip(pivots, red):
            v[p] = -row[free]
        basis.append(v)
    return basis
