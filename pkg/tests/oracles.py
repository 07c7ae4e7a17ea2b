"""Independent oracles used by the tests.  None of these call the LP code."""
from fractions import Fraction


def _cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def midpoint_pair_exact(e1, e2, p) -> bool:
    """Is there x1 on segment e1 and x2 on segment e2 with x1 + x2 = 2p?  Planar, exact."""
    (a1, b1), (a2, b2) = e1, e2
    u = (b1[0] - a1[0], b1[1] - a1[1])
    v = (b2[0] - a2[0], b2[1] - a2[1])
    r = (2 * p[0] - a1[0] - a2[0], 2 * p[1] - a1[1] - a2[1])  # s u + t v = r
    det = _cross(u, v)
    if det != 0:
        s = Fraction(_cross(r, v), det)
        t = Fraction(_cross(u, r), det)
        return 0 <= s <= 1 and 0 <= t <= 1
    # parallel edges: r must lie on the common line, then an interval check
    if _cross(u, r) != 0:
        return False
    k = 0 if u[0] != 0 else 1
    lam = Fraction(v[k], u[k])
    rho = Fraction(r[k], u[k])
    lo, hi = min(0, lam), max(0, lam)
    return lo <= rho <= 1 + hi


def midpoint_pair_sweep(e1, e2, p, steps: int = 256) -> bool:
    """Dense sweep of x1 along e1; exact check that 2p - x1 lies on e2."""
    (a1, b1), (a2, b2) = e1, e2
    v = (b2[0] - a2[0], b2[1] - a2[1])
    for k in range(steps + 1):
        s = Fraction(k, steps)
        x2 = (2 * p[0] - a1[0] - s * (b1[0] - a1[0]) - a2[0], 2 * p[1] - a1[1] - s * (b1[1] - a1[1]) - a2[1])
        if _cross(v, x2) != 0:
            continue
        t = Fraction(x2[0], v[0]) if v[0] != 0 else Fraction(x2[1], v[1])
        if 0 <= t <= 1:
            return True
    return False


def edge_segments(P):
    """(face, (endpoint, endpoint)) for every edge of a polygon."""
    return [(F, tuple(P.face_vertices(F))) for F in P.lattice.by_dim[1]]
