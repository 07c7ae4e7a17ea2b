"""Exact LP feasibility with Farkas certificates.

Phase-one simplex over :class:`~fractions.Fraction` with Bland's rule.
Equalities are kept as equalities.  Inequality rows of the form
``-c * x_j <= 0`` (c > 0) are recognised as sign constraints and handled as
nonnegative variables rather than as tableau rows; their multipliers are
recovered from the final reduced costs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .linalg import RVector, dot, vec

ZERO = Fraction(0)


class SoundnessError(RuntimeError):
    """An internal invariant failed.  Indicates a bug, never bad input."""


@dataclass(frozen=True)
class LinearSystem:
    """``A_ub x <= b_ub`` and ``A_eq x = b_eq`` over ``dim`` unknowns."""

    dim: int
    A_ub: tuple = ()
    b_ub: tuple = ()
    A_eq: tuple = ()
    b_eq: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "A_ub", tuple(vec(r) for r in self.A_ub))
        object.__setattr__(self, "b_ub", vec(self.b_ub))
        object.__setattr__(self, "A_eq", tuple(vec(r) for r in self.A_eq))
        object.__setattr__(self, "b_eq", vec(self.b_eq))
        if self.dim < 0:
            raise ValueError("negative dimension")
        if len(self.A_ub) != len(self.b_ub) or len(self.A_eq) != len(self.b_eq):
            raise ValueError("row count and right-hand side length differ")
        for r in self.A_ub + self.A_eq:
            if len(r) != self.dim:
                raise ValueError(f"row of length {len(r)} in a system of dimension {self.dim}")

    def satisfied_by(self, x: Sequence) -> bool:
        if len(x) != self.dim:
            return False
        return all(dot(a, x) <= b for a, b in zip(self.A_ub, self.b_ub)) and all(
            dot(a, x) == b for a, b in zip(self.A_eq, self.b_eq)
        )

    def refuted_by(self, y: Sequence) -> bool:
        """True when ``y`` is a valid Farkas certificate for this system.

        ``y`` lists multipliers for the inequality rows (must be >= 0) and then
        the equality rows (any sign).  The combination must be the zero row
        with a negative right-hand side, i.e. it derives ``0 <= -c``, c > 0.
        """
        m = len(self.A_ub)
        if len(y) != m + len(self.A_eq) or any(v < 0 for v in y[:m]):
            return False
        rows = self.A_ub + self.A_eq
        rhs = self.b_ub + self.b_eq
        for j in range(self.dim):
            if sum((yi * r[j] for yi, r in zip(y, rows)), ZERO) != 0:
                return False
        return dot(y, rhs) < 0


@dataclass(frozen=True)
class Feasible:
    witness: RVector

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Infeasible:
    farkas: RVector
    info: dict = field(default_factory=dict, compare=False)

    def __bool__(self):
        return False


def _sign_rows(sys: LinearSystem) -> dict[int, int]:
    """Map variable index -> first inequality row that says ``x_j >= 0``."""
    out: dict[int, int] = {}
    for k, (row, b) in enumerate(zip(sys.A_ub, sys.b_ub)):
        if b != 0:
            continue
        nz = [(j, a) for j, a in enumerate(row) if a != 0]
        if len(nz) == 1 and nz[0][1] < 0 and nz[0][0] not in out:
            out[nz[0][0]] = k
    return out


def lp_feasible(sys: LinearSystem) -> Feasible | Infeasible:
    """Decide feasibility of ``sys`` exactly.

    Returns :class:`Feasible` with a witness satisfying every row, or
    :class:`Infeasible` with a Farkas vector (see :meth:`LinearSystem.refuted_by`).
    Deterministic: the pivot rule is Bland's with lowest-index tie breaks.
    """
    n = sys.dim
    nonneg = _sign_rows(sys)
    bound_rows = set(nonneg.values())
    gen_ub = [k for k in range(len(sys.A_ub)) if k not in bound_rows]
    slack_of = {k: s for s, k in enumerate(gen_ub)}

    # column layout: original variables (free ones get a +/- pair), then slacks
    cols: list[tuple[int, int]] = []  # (variable, sign)
    for j in range(n):
        cols.append((j, 1))
        if j not in nonneg:
            cols.append((j, -1))
    nx = len(cols)

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    flips: list[int] = []
    origin: list[tuple[str, int]] = []
    n_slack = len(gen_ub)
    for s, k in enumerate(gen_ub):
        a = sys.A_ub[k]
        r = [a[j] * sg for j, sg in cols] + [ZERO] * n_slack
        r[nx + s] = Fraction(1)
        rows.append(r)
        rhs.append(sys.b_ub[k])
        origin.append(("ub", k))
    for k, a in enumerate(sys.A_eq):
        rows.append([a[j] * sg for j, sg in cols] + [ZERO] * n_slack)
        rhs.append(sys.b_eq[k])
        origin.append(("eq", k))
    m = len(rows)
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-x for x in rows[i]]
            rhs[i] = -rhs[i]
            flips.append(-1)
        else:
            flips.append(1)

    # initial basis: the slack where it is +1, an artificial otherwise
    ncore = nx + n_slack
    basis: list[int] = []
    art_of_row: dict[int, int] = {}
    next_art = ncore
    for i in range(m):
        if origin[i][0] == "ub" and flips[i] == 1:
            basis.append(nx + slack_of[origin[i][1]])
        else:
            art_of_row[i] = next_art
            basis.append(next_art)
            next_art += 1
    ncol = next_art
    T = []
    for i in range(m):
        r = rows[i] + [ZERO] * (ncol - ncore) + [rhs[i]]
        if i in art_of_row:
            r[art_of_row[i]] = Fraction(1)
        T.append(r)
    cost = [ZERO] * ncore + [Fraction(1)] * (ncol - ncore)
    # reduced costs row: c_j - c_B B^-1 A_j ; last entry is -objective
    red = cost + [ZERO]
    for i in range(m):
        if i in art_of_row:
            red = [x - y for x, y in zip(red, T[i])]

    while True:
        enter = next((j for j in range(ncol) if red[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:  # cannot happen in phase one: objective bounded below by 0
            raise SoundnessError("phase-one simplex reported unbounded")
        i = best[1]
        piv = T[i][enter]
        pr = [x / piv for x in T[i]]
        T[i] = pr
        for k in range(m):
            if k != i:
                f = T[k][enter]
                if f:
                    T[k] = [x - f * y for x, y in zip(T[k], pr)]
        f = red[enter]
        red = [x - f * y for x, y in zip(red, pr)]
        basis[i] = enter

    objective = -red[-1]
    if objective == 0:
        z = [ZERO] * ncol
        for i, b in enumerate(basis):
            z[b] = T[i][-1]
        x = [ZERO] * n
        for c, (j, sg) in enumerate(cols):
            if z[c]:
                x[j] += sg * z[c]
        w = tuple(x)
        if not sys.satisfied_by(w):
            raise SoundnessError("simplex witness fails substitution")
        return Feasible(w)

    # duals y_i: read from the columns that formed the initial identity
    y = []
    for i in range(m):
        if i in art_of_row:
            y.append(Fraction(1) - red[art_of_row[i]])
        else:
            y.append(-red[nx + slack_of[origin[i][1]]])
    lam = [ZERO] * len(sys.A_ub)
    mu = [ZERO] * len(sys.A_eq)
    for i, (kind, k) in enumerate(origin):
        w_i = -flips[i] * y[i]
        if kind == "ub":
            lam[k] = w_i
        else:
            mu[k] = w_i
    # sign rows absorb whatever is left on each nonnegative variable
    for j, k in nonneg.items():
        resid = sum((lam[r] * sys.A_ub[r][j] for r in range(len(sys.A_ub))), ZERO)
        resid += sum((mu[r] * sys.A_eq[r][j] for r in range(len(sys.A_eq))), ZERO)
        lam[k] = resid / -sys.A_ub[k][j]
    cert = tuple(lam + mu)
    if not sys.refuted_by(cert):
        raise SoundnessError("phase-one duals do not form a Farkas certificate")
    return Infeasible(cert, {"phase_one_objective": objective})
