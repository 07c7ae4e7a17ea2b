"""Seeded random polytopes and rational sample points."""
from __future__ import annotations

import random
from fractions import Fraction
from math import isqrt

from .linalg import RVector, barycenter
from .polytope import HPolytope, PolytopeError

MAX_DIM = 8


def random_polytope(seed: int, ambient_dim: int, facet_count: int, spread: int = 24, retries: int = 200) -> HPolytope:
    """Bounded, full-dimensional, irredundant ``{x : A x <= 1}`` with rational ``A``.

    Rows are integer vectors scaled to roughly unit length, so every row is
    (almost always) a facet; draws that are unbounded or lose a facet are
    resampled from the same stream.
    """
    if not 1 <= ambient_dim <= MAX_DIM:
        raise ValueError(f"ambient_dim must be in [1, {MAX_DIM}]")
    if facet_count < ambient_dim + 1:
        raise ValueError("need at least ambient_dim + 1 facets")
    if ambient_dim == 1 and facet_count != 2:
        raise ValueError("a 1-polytope has exactly 2 facets")
    rng = random.Random(seed)
    for _ in range(retries):
        rows = []
        while len(rows) < facet_count:
            v = [rng.randint(-spread, spread) for _ in range(ambient_dim)]
            n2 = sum(x * x for x in v)
            if not spread * spread // 4 <= n2 <= spread * spread:
                continue
            norm = isqrt(n2) or 1
            rows.append([Fraction(x, norm) for x in v])
        try:
            P = HPolytope(rows, [1] * facet_count)
        except PolytopeError:
            continue
        if P.n_facets == facet_count:
            return P
    raise RuntimeError(f"no valid polytope after {retries} draws (seed {seed})")


def random_convex_point(rng: random.Random, points, max_weight: int = 8) -> RVector:
    """Convex combination of ``points`` with small random integer weights."""
    while True:
        w = [rng.randint(0, max_weight) for _ in points]
        s = sum(w)
        if s:
            break
    D = len(points[0])
    return tuple(sum((Fraction(wi, s) * p[i] for wi, p in zip(w, points)), Fraction(0)) for i in range(D))


def dyadic_convex_point(rng: random.Random, points, bits: int = 4) -> RVector:
    """Convex combination with dyadic weights (denominator a power of two)."""
    k = len(points)
    total = 1 << bits
    cuts = sorted(rng.randint(0, total) for _ in range(k - 1))
    w = [b - a for a, b in zip([0] + cuts, cuts + [total])]
    D = len(points[0])
    return tuple(sum((Fraction(wi, total) * p[i] for wi, p in zip(w, points)), Fraction(0)) for i in range(D))


def sample_targets(P: HPolytope, seed: int, count: int = 20, n_vertices: int = 4, n_facets: int = 4) -> list[RVector]:
    """Targets mixing vertices, facet barycenters, random face points and interior points."""
    rng = random.Random(seed)
    L = P.lattice
    out: list[RVector] = []
    verts = list(P.vertices)
    for v in rng.sample(verts, min(n_vertices, len(verts))):
        out.append(v)
    facets = L.by_dim[P.ambient_dim - 1]
    for f in rng.sample(facets, min(n_facets, len(facets))):
        out.append(barycenter(P.face_vertices(f)))
    while len(out) < count:
        if rng.random() < 0.25:
            k = rng.randrange(1, P.ambient_dim)
            f = rng.choice(L.by_dim[k])
            out.append(random_convex_point(rng, P.face_vertices(f)))
        else:
            out.append(random_convex_point(rng, verts))
    return out[:count]
