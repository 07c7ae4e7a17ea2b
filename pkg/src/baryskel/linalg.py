"""Exact rational vectors, matrices and elimination.

Vectors are tuples of :class:`fractions.Fraction`; matrices are tuples of
such rows.  Nothing here ever touches a float.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

RVector = tuple  # tuple[Fraction, ...]
RMatrix = tuple  # tuple[RVector, ...]


def to_fraction(value) -> Fraction:
    """Parse ``"p/q"``, ``"p"``, ints and Fractions.  Floats are rejected."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        s = value.strip()
        if not s or any(c in s for c in ".eE "):
            raise ValueError(f"not a rational string: {value!r}")
        return Fraction(s)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def fmt(x: Fraction) -> str:
    """Canonical string form: ``"p/q"`` or ``"p"`` when q == 1."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def vec(values: Iterable) -> RVector:
    return tuple(to_fraction(v) for v in values)


def mat(rows: Iterable[Iterable]) -> RMatrix:
    rows = tuple(vec(r) for r in rows)
    if rows and len({len(r) for r in rows}) != 1:
        raise ValueError("ragged matrix")
    return rows


def fmt_vec(v: Sequence[Fraction]) -> list[str]:
    return [fmt(x) for x in v]


def dot(a: Sequence, b: Sequence) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def add(a: Sequence, b: Sequence) -> RVector:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence, b: Sequence) -> RVector:
    return tuple(x - y for x, y in zip(a, b))


def scale(c, a: Sequence) -> RVector:
    return tuple(c * x for x in a)


def matvec(M: Sequence[Sequence], v: Sequence) -> RVector:
    return tuple(dot(row, v) for row in M)


def barycenter(points: Sequence[Sequence]) -> RVector:
    k = len(points)
    return tuple(sum(col, Fraction(0)) / k for col in zip(*points))


def primitive(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Scale a rational vector to the primitive integer vector with the same direction."""
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g > 1:
        ints = [x // g for x in ints]
    return tuple(ints)


def rref(M: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form with lowest-index pivoting.

    Returns the nonzero rows of the RREF and the pivot columns.
    """
    rows = [[Fraction(x) for x in r] for r in M]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        inv = 1 / pr[c]
        if inv != 1:
            pr = [x * inv for x in pr]
            rows[r] = pr
        for i in range(len(rows)):
            if i != r:
                f = rows[i][c]
                if f:
                    ri = rows[i]
                    rows[i] = [a - f * b for a, b in zip(ri, pr)]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(M: Sequence[Sequence]) -> int:
    if not M:
        return 0
    return len(rref(M)[1])


def rank_nullspace(M: Sequence[Sequence]) -> tuple[int, list[RVector]]:
    """Exact rank and a nullspace basis of ``M``.

    The basis has one vector per non-pivot column, with a 1 in that column
    and zeros in the other free columns, so ``rank + len(basis)`` equals
    the column count.
    """
    if not M or not M[0]:
        raise ValueError("rank_nullspace needs a nonempty matrix")
    ncols = len(M[0])
    R, pivots = rref(M)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(R, pivots):
            v[pc] = -row[f]
        basis.append(tuple(v))
    return len(pivots), basis


def solve(M: Sequence[Sequence], rhs: Sequence) -> RVector | None:
    """Some exact solution of ``M x = rhs``, or None when the system is inconsistent."""
    ncols = len(M[0])
    aug = [list(r) + [Fraction(b)] for r, b in zip(M, rhs)]
    R, pivots = rref(aug)
    if pivots and pivots[-1] == ncols:
        return None
    x = [Fraction(0)] * ncols
    for row, pc in zip(R, pivots):
        x[pc] = row[ncols]
    return tuple(x)


def independent_rows(M: Sequence[Sequence]) -> list[int]:
    """Indices of a lexicographically first maximal independent subset of rows."""
    chosen: list[int] = []
    basis: list[list[Fraction]] = []  # echelon rows
    piv_cols: list[int] = []
    for idx, row in enumerate(M):
        r = [Fraction(x) for x in row]
        for b, pc in zip(basis, piv_cols):
            f = r[pc]
            if f:
                r = [x - f * y for x, y in zip(r, b)]
        pc = next((j for j, x in enumerate(r) if x != 0), None)
        if pc is None:
            continue
        inv = 1 / r[pc]
        r = [x * inv for x in r]
        # keep basis reduced so later eliminations stay one pass
        for i, b in enumerate(basis):
            f = b[pc]
            if f:
                basis[i] = [x - f * y for x, y in zip(b, r)]
        basis.append(r)
        piv_cols.append(pc)
        chosen.append(idx)
    return chosen


def affine_rank(points: Sequence[Sequence]) -> int:
    """Dimension of the affine hull of a nonempty point set."""
    if not points:
        return -1
    p0 = points[0]
    diffs = [sub(p, p0) for p in points[1:]]
    return rank(diffs) if diffs else 0
