"""Theorem-level checks: the Minkowski-sum identity and the known counterexamples."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .certificate import check_certificate
from .instances import dyadic_convex_point
from .linalg import RVector, barycenter, fmt, fmt_vec, vec
from .lp import Infeasible, SoundnessError
from .polytope import Face, HPolytope, VPolytope, h_from_v, simplex
from .solver import DEFAULT, Decomposition, SolverConfig, decompose, ordered_tuples, search, tuple_feasible

Sampler = Callable[[HPolytope, random.Random, int], list]


@dataclass
class VerificationReport:
    instance: str
    directions: list
    attempted: int = 0
    succeeded: int = 0
    witnesses: list = field(default_factory=list)
    counterexample: RVector | None = None
    certificates: list = field(default_factory=list)
    elapsed: float = 0.0
    notes: dict = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return self.counterexample is None and self.attempted == self.succeeded

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "instance": self.instance,
            "directions": self.directions,
            "attempted": self.attempted,
            "succeeded": self.succeeded,
            "verified": self.verified,
            "witnesses": self.witnesses,
            "counterexample": None if self.counterexample is None else fmt_vec(self.counterexample),
            "certificates": self.certificates,
            "notes": self.notes,
        }
        if timing:
            out["elapsed"] = self.elapsed
        return out


def random_sampler(P: HPolytope, rng: random.Random, count: int) -> list[RVector]:
    """Dyadic convex combinations of random vertex subsets."""
    out = []
    verts = list(P.vertices)
    for _ in range(count):
        k = rng.randint(1, min(len(verts), P.ambient_dim + 1))
        out.append(dyadic_convex_point(rng, rng.sample(verts, k)))
    return out


def grid_sampler(P: HPolytope, rng: random.Random, count: int) -> list[RVector]:
    """Points of the coarsest dyadic grid over the bounding box with at least ``count`` inside P."""
    pts = []
    for level in range(1, 12):
        pts = list(_dyadic_grid(P, level))
        if len(pts) >= count:
            rng.shuffle(pts)
            return sorted(pts[:count])
    raise ValueError("grid too fine for this polytope")


def verify_minkowski(P: HPolytope, n: int, d: int, samples: int = 100, seed: int = 0,
                     sampler: Sampler = random_sampler, cfg: SolverConfig = DEFAULT,
                     keep_witnesses: bool = False) -> VerificationReport:
    """Check ``n P = S + ... + S`` (S the d-skeleton) on seeded samples in both directions."""
    if P.ambient_dim != n * d:
        raise ValueError(f"polytope dimension {P.ambient_dim} != n*d = {n * d}")
    t0 = time.perf_counter()
    rng = random.Random(seed)
    rep = VerificationReport(f"minkowski n={n} d={d} dim={P.ambient_dim} facets={P.n_facets}", ["subset", "superset"])
    faces = P.lattice.by_dim[d]
    # sums of skeleton points land in nP
    sub_ok = 0
    for _ in range(samples):
        pts = [dyadic_convex_point(rng, P.face_vertices(rng.choice(faces))) for _ in range(n)]
        s = tuple(sum(c) for c in zip(*pts))
        if not all(sum(a * x for a, x in zip(row, s)) <= n * b for row, b in zip(P.A, P.b)):
            raise SoundnessError(f"sum of skeleton points {fmt_vec(s)} is outside nP")
        sub_ok += 1
    # every sampled point of nP splits into n skeleton points
    sup_ok = 0
    for x in sampler(P, rng, samples):
        q = tuple(n * c for c in x)
        dec = decompose(P, tuple(c / n for c in q), n, cfg)
        cert = dec.to_json()
        if not check_certificate(P, cert):
            sup_ok += 1
            if keep_witnesses:
                rep.witnesses.append(cert)
    rep.attempted = 2 * samples
    rep.succeeded = sub_ok + sup_ok
    rep.notes = {"subset_ok": sub_ok, "superset_ok": sup_ok, "samples": samples, "seed": seed}
    rep.elapsed = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# counterexamples


def _refute_all(P: HPolytope, face_lists, p, weights, dims) -> tuple[Decomposition | None, list]:
    """Exact check of every tuple at ``p``; stop at the first feasible one.

    Returns ``(witness, [])`` or ``(None, certificates)`` with one Farkas
    vector per tuple.
    """
    certs = []
    for tup in ordered_tuples(P, face_lists, p, weights, DEFAULT):
        res = tuple_feasible(P, tup, p, weights, dims)
        if isinstance(res, Decomposition):
            return res, []
        certs.append({"faces": [list(F.key) for F in tup], "farkas": fmt_vec(res.farkas)})
    certs.sort(key=lambda c: c["faces"])
    return None, certs


def _dyadic_grid(P: HPolytope, level: int):
    """Grid points of P at spacing 2**-level of the bounding box, in lexicographic order.

    A float pass discards points far outside; survivors get the exact test.
    """
    D = P.ambient_dim
    lo = [min(v[i] for v in P.vertices) for i in range(D)]
    hi = [max(v[i] for v in P.vertices) for i in range(D)]
    m = 1 << level
    idx = np.indices((m + 1,) * D).reshape(D, -1).T
    X = np.array([float(a) for a in lo]) + idx * (np.array([float(b - a) for a, b in zip(lo, hi)]) / m)
    A = np.array([[float(a) for a in row] for row in P.A])
    b = np.array([float(x) for x in P.b])
    near = np.all(X @ A.T <= b + 1e-9 * (1 + np.abs(b)), axis=1)
    for row in idx[near]:
        x = tuple(lo[i] + (hi[i] - lo[i]) * Fraction(int(row[i]), m) for i in range(D))
        if P.contains(x):
            yield x


def _search_counterexample(P, face_lists, weights, dims, candidates, rep: VerificationReport):
    seen = set()
    for p in candidates:
        if p in seen:
            continue
        seen.add(p)
        rep.attempted += 1
        wit, certs = _refute_all(P, face_lists, p, weights, dims)
        if wit is None:
            rep.counterexample = p
            rep.certificates = certs
            return True
        rep.succeeded += 1
    return False


def triangular_prism() -> HPolytope:
    """The unit right triangle times [0, 1]."""
    tri = [(0, 0), (1, 0), (0, 1)]
    return h_from_v(VPolytope.from_points([(x, y, z) for z in (0, 1) for x, y in tri]))


def falsify_weighted_prism(eps, max_level: int = 4) -> VerificationReport:
    """Search the prism for a point that is no (1, 1, 1+eps)-weighted barycenter of edge points."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive; eps = 0 is the equal-weight theorem")
    t0 = time.perf_counter()
    P = triangular_prism()
    edges = P.lattice.by_dim[1]
    total = 3 + eps
    weights = [1 / total, 1 / total, (1 + eps) / total]
    rep = VerificationReport(f"weighted prism eps={fmt(eps)}", ["counterexample"])
    rep.notes = {"weights": [fmt(w) for w in weights], "tuples": None}

    def candidates():
        yield P.centroid
        for level in range(1, max_level + 1):
            yield from _dyadic_grid(P, level)

    found = _search_counterexample(P, [edges, edges, list(edges)], weights, [1, 1, 1], candidates(), rep)
    if found:
        rep.notes["tuples"] = len(rep.certificates)
    rep.elapsed = time.perf_counter() - t0
    return rep


def regular_simplex(D: int) -> HPolytope:
    """Regular simplex for D = 3 (alternate cube vertices); an affine image of one otherwise.

    Feasibility of barycentric decompositions is affinely invariant, so the
    standard simplex stands in where no rational regular simplex exists.
    """
    if D == 3:
        return h_from_v(VPolytope.from_points([(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]))
    return simplex(D)


def falsify_mixed_skeleton_simplex(a: int, b: int, d: int, samples: int = 100, seed: int = 0,
                                   P: HPolytope | None = None, max_level: int = 4) -> VerificationReport:
    """Two equal-weight points in the a- and b-skeleton of a (2d+1)-simplex.

    (a, b) = (d, d+1) is checked on samples; any other split is searched
    for a point that no (a-face, b-face) pair reaches.
    """
    D = 2 * d + 1
    if d < 0 or a + b != D or not 0 <= a <= b <= D:
        raise ValueError("need a + b = 2d + 1 and 0 <= a <= b")
    t0 = time.perf_counter()
    P = regular_simplex(D) if P is None else P
    if P.ambient_dim != D or len(P.vertices) != D + 1:
        raise ValueError("instance is not a (2d+1)-simplex")
    fa, fb = P.lattice.by_dim[a], P.lattice.by_dim[b]
    weights = [Fraction(1, 2)] * 2
    rep = VerificationReport(f"simplex dim={D} skeletons=({a},{b})", [])
    if (a, b) == (d, d + 1):
        rep.directions = ["feasibility"]
        rng = random.Random(seed)
        for x in random_sampler(P, rng, samples):
            rep.attempted += 1
            dec = search(P, [fa, fb], x, weights, DEFAULT, [a, b])
            if dec is None:
                rep.counterexample = x
                _, rep.certificates = _refute_all(P, [fa, fb], x, weights, [a, b])
                break
            if not check_certificate(P, dec.to_json()):
                rep.succeeded += 1
    else:
        rep.directions = ["counterexample"]

        def candidates():
            yield P.centroid
            for level in range(1, max_level + 1):
                yield from _dyadic_grid(P, level)

        _search_counterexample(P, [fa, fb], weights, [a, b], candidates(), rep)
    rep.notes = {"pairs": len(fa) * len(fb)}
    rep.elapsed = time.perf_counter() - t0
    return rep
