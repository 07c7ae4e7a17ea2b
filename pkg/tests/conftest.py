import itertools
from fractions import Fraction

import pytest
import sympy

from baryskel.polytope import HPolytope, cube, polygon


def brute_vertices(P: HPolytope) -> set:
    """Vertices from every D-subset of facets, solved with sympy (independent of the DD code)."""
    D = P.ambient_dim
    out = set()
    for rows in itertools.combinations(range(P.n_facets), D):
        M = sympy.Matrix([[sympy.Rational(a.numerator, a.denominator) for a in P.A[k]] for k in rows])
        if M.rank() < D:
            continue
        rhs = sympy.Matrix([sympy.Rational(P.b[k].numerator, P.b[k].denominator) for k in rows])
        x = M.LUsolve(rhs)
        xf = tuple(Fraction(int(c.p), int(c.q)) for c in x)
        if all(sum(a * v for a, v in zip(row, xf)) <= b for row, b in zip(P.A, P.b)):
            out.add(xf)
    return out


def sym_rank(rows) -> int:
    if not rows:
        return 0
    return sympy.Matrix([[sympy.Rational(Fraction(x).numerator, Fraction(x).denominator) for x in r] for r in rows]).rank()


@pytest.fixture
def square():
    return cube(2)


@pytest.fixture
def cube4():
    return cube(4)


@pytest.fixture
def square02():
    return polygon([(0, 0), (2, 0), (2, 2), (0, 2)])
