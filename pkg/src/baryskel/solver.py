"""Barycentric decomposition of a point into points of a skeleton.

For ``P`` of dimension ``n * d`` and ``p`` in ``P`` the search runs over
tuples of d-faces; each tuple is one exact LP in the convex-combination
weights of the faces' vertices.  Tuples are screened and ordered with the
float kernel first, then checked exactly in that order.  Every tuple is
eventually tried, so a witness is always found when one exists.
"""
from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .kernels import screen_tuples
from .linalg import RVector, dot, fmt, fmt_vec, vec
from .lp import Feasible, Infeasible, LinearSystem, SoundnessError, lp_feasible
from .polytope import (
    Face,
    HPolytope,
    Outside,
    OutsideError,
    containing_face,
    embed_face,
    minimal_face,
)

log = logging.getLogger(__name__)


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    order: str = "heuristic"  # or "canonical"
    symmetry: bool = True
    parallel: bool = False
    budget: int | None = None
    threads: int = 4

    def __post_init__(self):
        if self.order not in ("heuristic", "canonical"):
            raise ValueError(f"unknown search order {self.order!r}")
        if self.budget is not None and self.budget < 1:
            raise ValueError("tuple budget must be at least 1")
        if self.threads < 1:
            raise ValueError("threads must be positive")


DEFAULT = SolverConfig()


@dataclass(frozen=True)
class Decomposition:
    target: RVector
    points: tuple
    faces: tuple
    weights: tuple
    skeleton_dims: tuple
    stats: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not len(self.points) == len(self.faces) == len(self.weights) == len(self.skeleton_dims):
            raise ValueError("decomposition fields have different lengths")

    @property
    def n(self) -> int:
        return len(self.points)

    def residual(self) -> RVector:
        D = len(self.target)
        return tuple(
            sum((w * x[i] for w, x in zip(self.weights, self.points)), Fraction(0)) - self.target[i]
            for i in range(D)
        )

    def to_json(self) -> dict:
        return {
            "target": fmt_vec(self.target),
            "weights": [fmt(w) for w in self.weights],
            "points": [fmt_vec(x) for x in self.points],
            "faces": [f.to_json() for f in self.faces],
            "skeleton_dims": list(self.skeleton_dims),
            "exact": all(r == 0 for r in self.residual()),
        }


# ---------------------------------------------------------------------------
# one tuple


def tuple_system(P: HPolytope, faces: Sequence[Face], p: Sequence, weights: Sequence) -> tuple[LinearSystem, list]:
    """Stacked system in the convex weights of each face's vertices."""
    D = P.ambient_dim
    cols = []  # (slot, vertex)
    for i, f in enumerate(faces):
        for vi in f.vertex_indices():
            cols.append((i, P.vertices[vi]))
    N = len(cols)
    A_eq, b_eq = [], []
    for c in range(D):
        A_eq.append([weights[i] * v[c] for i, v in cols])
        b_eq.append(p[c])
    for i in range(len(faces)):
        A_eq.append([Fraction(int(s == i)) for s, _ in cols])
        b_eq.append(Fraction(1))
    A_ub = [[Fraction(-int(j == k)) for j in range(N)] for k in range(N)]
    return LinearSystem(N, A_ub, [0] * N, A_eq, b_eq), cols


def tuple_feasible(P: HPolytope, faces: Sequence[Face], p: Sequence, weights: Sequence | None = None,
                   skeleton_dims: Sequence[int] | None = None) -> Decomposition | Infeasible:
    """Points ``x_i`` in the closed faces with ``sum w_i x_i = p``, or a Farkas refutation.

    Weights default to ``1/n`` each, i.e. ``sum x_i = n p``.
    """
    n = len(faces)
    p = vec(p)
    weights = tuple(Fraction(1, n) for _ in range(n)) if weights is None else vec(weights)
    sys, cols = tuple_system(P, faces, p, weights)
    res = lp_feasible(sys)
    if isinstance(res, Infeasible):
        return res
    D = P.ambient_dim
    pts = [[Fraction(0)] * D for _ in range(n)]
    for lam, (i, v) in zip(res.witness, cols):
        if lam:
            for c in range(D):
                pts[i][c] += lam * v[c]
    dims = tuple(skeleton_dims) if skeleton_dims is not None else tuple(f.dim for f in faces)
    return Decomposition(p, tuple(tuple(x) for x in pts), tuple(faces), weights, dims)


# ---------------------------------------------------------------------------
# tuple enumeration and screening


def enumerate_tuples(sizes: Sequence[int], groups: Sequence[int], symmetry: bool) -> np.ndarray:
    """All index tuples in canonical (lexicographic) order.

    ``sizes[i]`` is the number of candidate faces for slot i; slots sharing a
    ``groups`` label are interchangeable, and with ``symmetry`` only sorted
    index runs are kept inside a group.
    """
    n = len(sizes)
    if not symmetry:
        it = itertools.product(*(range(s) for s in sizes))
        return np.array(list(it), dtype=np.int64).reshape(-1, n)
    order: list[list[int]] = []
    for g in dict.fromkeys(groups):
        order.append([i for i in range(n) if groups[i] == g])
    parts = [list(itertools.combinations_with_replacement(range(sizes[slots[0]]), len(slots))) for slots in order]
    out = []
    for combo in itertools.product(*parts):
        t = [0] * n
        for slots, vals in zip(order, combo):
            for s, v in zip(slots, vals):
                t[s] = v
        out.append(t)
    return np.array(out, dtype=np.int64).reshape(-1, n)


def _face_table(P: HPolytope, faces: Sequence[Face]):
    """Float support values and centroids of faces along P's facet normals and the axes."""
    D = P.ambient_dim
    dirs = [[float(a) for a in row] for row in P.A]
    for i in range(D):
        e = [0.0] * D
        e[i] = 1.0
        dirs.append(e)
    U = np.array(dirs + [[-x for x in d] for d in dirs])
    V = np.array([[float(x) for x in v] for v in P.vertices])
    proj = V @ U.T
    H = np.empty((len(faces), U.shape[0]))
    C = np.empty((len(faces), D))
    for k, f in enumerate(faces):
        idx = f.vertex_indices()
        H[k] = proj[idx].max(axis=0)
        C[k] = V[idx].mean(axis=0)
    return U, H, C


def ordered_tuples(P: HPolytope, face_lists: Sequence[Sequence[Face]], p: Sequence, weights: Sequence,
                   cfg: SolverConfig = DEFAULT) -> list[tuple[Face, ...]]:
    """Candidate tuples in the order the exact checks should visit them."""
    n = len(face_lists)
    pool: list[Face] = []
    offsets = {}
    for fl in face_lists:
        key = id(fl)
        if key not in offsets:
            offsets[key] = len(pool)
            pool.extend(fl)
    base = [offsets[id(fl)] for fl in face_lists]
    groups = [(id(fl), Fraction(w)) for fl, w in zip(face_lists, weights)]
    gid = {g: i for i, g in enumerate(dict.fromkeys(groups))}
    combos = enumerate_tuples([len(fl) for fl in face_lists], [gid[g] for g in groups], cfg.symmetry)
    combos = combos + np.array(base, dtype=np.int64)
    if cfg.order == "canonical" or len(combos) <= 1:
        order = np.arange(len(combos))
    else:
        U, H, C = _face_table(P, pool)
        pf = np.array([float(x) for x in p])
        scale = 1.0 + float(np.abs(H).max())
        ok, score = screen_tuples(H, C, U @ pf, pf, np.array([float(w) for w in weights]), combos, 1e-9 * scale)
        # screened-in tuples by score, then the rest; ties keep canonical order
        order = np.lexsort((np.arange(len(combos)), score, ~ok))
    return [tuple(pool[j] for j in combos[t]) for t in order]


def search(P: HPolytope, face_lists: Sequence[Sequence[Face]], p: Sequence, weights: Sequence,
           cfg: SolverConfig = DEFAULT, skeleton_dims: Sequence[int] | None = None) -> Decomposition | None:
    """First feasible tuple in search order, or None after trying all of them."""
    cands = ordered_tuples(P, face_lists, p, weights, cfg)
    tried = 0

    def check(tup):
        return tuple_feasible(P, tup, p, weights, skeleton_dims)

    if cfg.parallel and len(cands) > 1:
        chunk = 4 * cfg.threads
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            for start in range(0, len(cands), chunk):
                batch = cands[start:start + chunk]
                if cfg.budget is not None and tried + len(batch) > cfg.budget:
                    batch = batch[: cfg.budget - tried]
                    if not batch:
                        raise BudgetExceeded(f"tuple budget {cfg.budget} exhausted")
                for res in pool.map(check, batch):
                    tried += 1
                    if isinstance(res, Decomposition):
                        return _with_stats(res, tried, len(cands))
                if cfg.budget is not None and tried >= cfg.budget:
                    raise BudgetExceeded(f"tuple budget {cfg.budget} exhausted")
        return None
    for tup in cands:
        if cfg.budget is not None and tried >= cfg.budget:
            raise BudgetExceeded(f"tuple budget {cfg.budget} exhausted")
        tried += 1
        res = check(tup)
        if isinstance(res, Decomposition):
            return _with_stats(res, tried, len(cands))
    return None


def _with_stats(dec: Decomposition, tried: int, total: int) -> Decomposition:
    dec.stats.update(tuples_tried=tried, tuples_total=total)
    return dec


# ---------------------------------------------------------------------------
# decompositions


def _factor(n: int) -> list[int]:
    out, q = [], 2
    while q * q <= n:
        while n % q == 0:
            out.append(q)
            n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and _factor(n) == [n]


def _locate(P: HPolytope, p) -> Face:
    f = minimal_face(P, p)
    if isinstance(f, Outside):
        raise OutsideError(f"target violates facet inequality {f.row}", f.row)
    return f


def repeated(P: HPolytope, p: RVector, n: int, d: int) -> Decomposition:
    """``p`` taken n times, for a target already lying in a d-face."""
    face = containing_face(P, p, d)
    w = Fraction(1, n)
    return Decomposition(p, (p,) * n, (face,) * n, (w,) * n, (d,) * n, {"tuples_tried": 0})


def decompose_prime(P: HPolytope, p: Sequence, n: int, d: int, cfg: SolverConfig = DEFAULT) -> Decomposition:
    """n points of the d-skeleton with barycenter exactly ``p`` (n prime)."""
    p = vec(p)
    if P.ambient_dim != n * d:
        raise ValueError(f"polytope dimension {P.ambient_dim} != n*d = {n * d}")
    if not is_prime(n):
        raise ValueError(f"n = {n} is not prime; use decompose()")
    if len(p) != P.ambient_dim:
        raise ValueError("target has the wrong dimension")
    here = _locate(P, p)
    if here.dim <= d:
        return repeated(P, p, n, d)
    faces = P.lattice.by_dim[d]
    dec = search(P, [faces] * n, p, [Fraction(1, n)] * n, cfg, [d] * n)
    if dec is None:
        raise SoundnessError(f"no tuple of {d}-faces has barycenter {fmt_vec(p)}")
    return dec


def decompose(P: HPolytope, p: Sequence, n: int, cfg: SolverConfig = DEFAULT) -> Decomposition:
    """n points of the (dim/n)-skeleton with barycenter ``p``, any n >= 1.

    Composite n is split as n = m * q with q the largest prime factor: first
    q points in the (dim/q)-skeleton, then each of those is decomposed into
    m points inside the face that holds it.
    """
    p = vec(p)
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")
    D = P.ambient_dim
    if D % n:
        raise ValueError(f"dimension {D} is not divisible by n = {n}")
    if len(p) != D:
        raise ValueError("target has the wrong dimension")
    d = D // n
    if n == 1:
        _locate(P, p)
        top = P.lattice.top
        return Decomposition(p, (p,), (top,), (Fraction(1),), (D,), {"tuples_tried": 0})
    primes = _factor(n)
    if len(primes) == 1:
        return decompose_prime(P, p, n, d, cfg)
    q = primes[-1]
    m = n // q
    stage = decompose_prime(P, p, q, D // q, cfg)
    pts, faces = [], []
    tried = stage.stats.get("tuples_tried", 0)
    for x, G in zip(stage.points, stage.faces):
        emb = embed_face(P, G)
        sub = decompose(emb.local, emb.to_local(x), m, cfg)
        tried += sub.stats.get("tuples_tried", 0)
        for y, Fl in zip(sub.points, sub.faces):
            gx = emb.to_global(y)
            pts.append(gx)
            faces.append(P.lattice.by_tight[P.tight_set(emb.to_global(Fl.sample))])
    w = Fraction(1, n)
    return Decomposition(p, tuple(pts), tuple(faces), (w,) * n, (d,) * n, {"tuples_tried": tried})


def mixed_shape(ambient_dim: int, chain: Sequence[int]) -> tuple[list[Fraction], list[int]]:
    """Weights and skeleton dimensions produced by :func:`mixed_decompose`."""
    chain = list(chain)
    if not chain or any((not isinstance(c, int)) or c < 2 for c in chain):
        raise ValueError("chain entries must be integers >= 2")
    total = 1
    for c in chain:
        total *= c
    if ambient_dim % total:
        raise ValueError(f"dimension {ambient_dim} is not divisible by the chain product {total}")
    weights, dims = [], []
    scale, dim = Fraction(1), ambient_dim
    for k, c in enumerate(chain):
        dim //= c
        keep = c if k == len(chain) - 1 else c - 1
        weights += [scale / c] * keep
        dims += [dim] * keep
        scale /= c
    return weights, dims


def mixed_decompose(P: HPolytope, p: Sequence, chain: Sequence[int], cfg: SolverConfig = DEFAULT) -> Decomposition:
    """Weighted decomposition across a chain of skeletons.

    At each stage all but the last point are kept; the last is decomposed
    again inside its face with the next chain entry.  For chain [2, 2] on a
    4-polytope: p = 1/2 p1 + 1/4 (q1 + q2), p1 in the 2-skeleton, q in the 1-skeleton.
    """
    p = vec(p)
    weights, dims = mixed_shape(P.ambient_dim, chain)
    _locate(P, p)
    pts, faces = [], []
    cur_P, cur_p = P, p
    to_global = lambda y: y  # noqa: E731
    for k, c in enumerate(chain):
        dec = decompose(cur_P, cur_p, c, cfg)
        last = k == len(chain) - 1
        keep = dec.n if last else dec.n - 1
        for y, F in zip(dec.points[:keep], dec.faces[:keep]):
            pts.append(to_global(y))
            faces.append(P.lattice.by_tight[P.tight_set(to_global(F.sample))])
        if last:
            break
        emb = embed_face(cur_P, dec.faces[-1])
        prev = to_global
        to_global = lambda y, emb=emb, prev=prev: prev(emb.to_global(y))  # noqa: E731
        cur_P, cur_p = emb.local, emb.to_local(dec.points[-1])
    dec = Decomposition(p, tuple(pts), tuple(faces), tuple(weights), tuple(dims))
    if any(dec.residual()):
        raise SoundnessError("mixed decomposition lost the barycenter identity")
    return dec
