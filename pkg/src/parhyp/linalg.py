"""Exact linear algebra over Z, Q and F_p for small dense matrices."""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Sequence

Matrix = Sequence[Sequence[int]]


def _bareiss(rows: Matrix) -> tuple[int, list[list[int]], int]:
    """Fraction-free elimination.  Returns (rank, echelon rows, sign) where
    sign tracks row swaps; all intermediate entries stay integral."""
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    prev = 1
    rank = 0
    sign = 1
    for col in range(ncols):
        if rank == nrows:
            break
        pivot = next((r for r in range(rank, nrows) if m[r][col] != 0), None)
        if pivot is None:
            continue
        if pivot != rank:
            m[rank], m[pivot] = m[pivot], m[rank]
            sign = -sign
        piv = m[rank][col]
        for r in range(rank + 1, nrows):
            for c in range(col + 1, ncols):
                m[r][c] = (m[r][c] * piv - m[r][col] * m[rank][c]) // prev
            m[r][col] = 0
        prev = piv
        rank += 1
    return rank, m, sign


def rank_int(rows: Matrix) -> int:
    if not rows:
        return 0
    return _bareiss(rows)[0]


def det_int(rows: Matrix) -> int:
    n = len(rows)
    if n == 0:
        return 1
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    rank, m, sign = _bareiss(rows)
    if rank < n:
        return 0
    return sign * m[n - 1][n - 1]


def rank_mod(rows: Matrix, p: int) -> int:
    return len(_rref_mod(rows, p)[1])


def _rref_mod(rows: Matrix, p: int) -> tuple[list[list[int]], list[int]]:
    m = [[x % p for x in r] for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, nrows) if m[i][col]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = pow(m[r][col], -1, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    return m, pivots


def nullspace_mod(rows: Matrix, ncols: int, p: int) -> list[list[int]]:
    """Basis of {v : rows @ v = 0} over F_p."""
    if not rows:
        return [[int(i == j) for i in range(ncols)] for j in range(ncols)]
    m, pivots = _rref_mod(rows, p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][f] % p
        basis.append(v)
    return basis


def integer_kernel_vector(rows: Matrix) -> list[int]:
    """Primitive integer vector lam with sum_i lam[i] * rows[i] = 0, for a
    list of rows whose dependency space is one-dimensional.  The first
    nonzero entry of the result is positive."""
    r = len(rows)
    k = len(rows[0])
    # solve M^T lam = 0 with M^T of shape k x r, via exact RREF over Q
    mt = [[Fraction(rows[i][c]) for i in range(r)] for c in range(k)]
    pivots = []
    row = 0
    for col in range(r):
        pivot = next((i for i in range(row, k) if mt[i][col] != 0), None)
        if pivot is None:
            continue
        mt[row], mt[pivot] = mt[pivot], mt[row]
        pv = mt[row][col]
        mt[row] = [x / pv for x in mt[row]]
        for i in range(k):
            if i != row and mt[i][col] != 0:
                f = mt[i][col]
                mt[i] = [x - f * y for x, y in zip(mt[i], mt[row])]
        pivots.append(col)
        row += 1
        if row == k:
            break
    free = [c for c in range(r) if c not in pivots]
    if len(free) != 1:
        raise ValueError(f"kernel has dimension {len(free)}, expected 1")
    f = free[0]
    lam = [Fraction(0)] * r
    lam[f] = Fraction(1)
    for i, pc in enumerate(pivots):
        lam[pc] = -mt[i][f]
    denom = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for x in lam), 1)
    ints = [int(x * denom) for x in lam]
    g = reduce(gcd, (abs(x) for x in ints))
    ints = [x // g for x in ints]
    first = next(x for x in ints if x)
    if first < 0:
        ints = [-x for x in ints]
    return ints
