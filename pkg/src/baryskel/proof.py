"""The existence proof, run as a computation.

``Q`` is the polytope of n-tuples of points of ``P`` (target moved to the
origin) whose sum is zero.  Each face of ``Q`` is labelled by the faces
``E_1..E_n`` of ``P`` holding its columns.  The map phi sends the barycenter
of a face to ``dim E_i - mean(dim E)`` and is extended linearly over chains
of faces.  A zero of phi on a chain of faces of dimension 0..n-1 is found by
exact LP, and the descent step shows it sits on the bottom vertex of the
chain, whose columns then lie in d-faces.

Non-generic instances are perturbed, and the face tuple found on the
perturbed polytope is re-certified exactly on the original one.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

from .linalg import RVector, fmt, fmt_vec, vec
from .lp import Infeasible, LinearSystem, SoundnessError, lp_feasible
from .polytope import Face, HPolytope, OutsideError, PolytopeError, minimal_face, normalize_to_unit_form
from .solver import Decomposition, is_prime, repeated, tuple_feasible

Trace = Callable[[dict], None]


class NotGeneric(ValueError):
    pass


class PerturbationTooLarge(ValueError):
    """Signals the caller to retry with a smaller perturbation."""


@dataclass
class QComplex:
    """``Q = P^n ∩ X`` in the coordinates of its first n-1 columns."""

    P: HPolytope
    n: int
    Q: HPolytope
    labels: dict  # Q-face tight key -> tuple of P faces
    d: int

    @property
    def product_dim(self) -> int:
        return self.n * self.P.ambient_dim

    def columns(self, y: Sequence) -> list[RVector]:
        D = self.P.ambient_dim
        cols = [tuple(y[i * D:(i + 1) * D]) for i in range(self.n - 1)]
        cols.append(tuple(-sum((c[k] for c in cols), Fraction(0)) for k in range(D)))
        return cols

    def label(self, F: Face) -> tuple:
        return self.labels[F.key]

    def label_dims(self, F: Face) -> tuple[int, ...]:
        return tuple(E.dim for E in self.labels[F.key])

    @cached_property
    def violations(self) -> list[tuple[Face, int, int]]:
        nd = self.n * self.d
        out = []
        for F in self.Q.lattice:
            expected = sum(self.label_dims(F)) - nd
            if F.dim != expected:
                out.append((F, F.dim, expected))
        return out

    @property
    def generic(self) -> bool:
        return not self.violations

    def T(self) -> list[Face]:
        """Faces of the (n-1)-skeleton of Q."""
        L = self.Q.lattice
        return [F for k in range(min(self.n, L.ambient_dim + 1)) for F in L.by_dim[k]]

    @cached_property
    def phi(self) -> dict:
        """phi(q_F) for every proper face F, keyed by the face's tight key."""
        out = {}
        top = self.Q.lattice.top
        for F in self.Q.lattice:
            if F is top:
                continue
            dims = self.label_dims(F)
            mean = Fraction(sum(dims), self.n)
            val = tuple(Fraction(x) - mean for x in dims)
            if sum(val) != 0:
                raise SoundnessError("phi value is not in the zero-sum plane")
            out[F.key] = val
        return out


def build_q(P0: HPolytope, n: int) -> QComplex:
    """Build ``Q`` for ``P0`` with the target at an interior origin."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if any(bi <= 0 for bi in P0.b):
        raise ValueError("origin is not interior to the polytope; move the target first")
    D = P0.ambient_dim
    if D % n:
        raise ValueError(f"dimension {D} is not divisible by n = {n}")
    f = P0.n_facets
    width = (n - 1) * D
    rows, rhs = [], []
    for i in range(n):
        for k in range(f):
            r = [Fraction(0)] * width
            if i < n - 1:
                r[i * D:(i + 1) * D] = P0.A[k]
            else:
                for j in range(n - 1):
                    r[j * D:(j + 1) * D] = [-a for a in P0.A[k]]
            rows.append(r)
            rhs.append(P0.b[k])
    Q = HPolytope(rows, rhs)
    qc = QComplex(P0, n, Q, {}, D // n)
    for F in Q.lattice:
        labs = []
        for x in qc.columns(F.sample):
            E = minimal_face(P0, x)
            if not isinstance(E, Face):
                raise SoundnessError("a column of Q leaves P")
            labs.append(E)
        qc.labels[F.key] = tuple(labs)
    return qc


def check_genericity(qc: QComplex) -> list[tuple[Face, int, int]]:
    """Faces where ``dim F != sum dim E_i - n d`` as ``(face, dim F, sum - nd)``; empty when generic."""
    return list(qc.violations)


def perturb(P0: HPolytope, seed: int, magnitude) -> HPolytope:
    """``{x : (A + eps) x <= 1}`` with seeded entries ``|eps_ij| <= magnitude``."""
    magnitude = Fraction(magnitude)
    if magnitude < 0:
        raise ValueError("magnitude must be nonnegative")
    if any(bi != 1 for bi in P0.b):
        raise ValueError("perturb expects offsets normalised to 1")
    if magnitude == 0:
        return P0
    rng = random.Random(seed)
    grain = 1 << 8
    A = [[a + magnitude * Fraction(rng.randint(-grain, grain), grain) for a in row] for row in P0.A]
    try:
        Pe = HPolytope(A, P0.b)
    except PolytopeError as e:
        raise PerturbationTooLarge(str(e)) from None
    if Pe.n_facets != P0.n_facets:
        raise PerturbationTooLarge("perturbation removed a facet")
    return Pe


@dataclass
class Chain:
    faces: tuple  # F_0 ⊂ ... ⊂ F_{n-1}
    t: tuple

    def to_json(self) -> dict:
        return {"faces": [list(F.key) for F in self.faces], "dims": [F.dim for F in self.faces], "t": fmt_vec(self.t)}


def _chains(qc: QComplex):
    L = qc.Q.lattice
    n = qc.n

    def extend(chain):
        if len(chain) == n:
            yield tuple(chain)
            return
        for G in L.superfaces(chain[-1], len(chain)):
            yield from extend(chain + [G])

    for v in L.by_dim[0]:
        yield from extend([v])


def find_phi_zero(qc: QComplex) -> tuple[Chain, RVector]:
    """First chain (canonical order) whose simplex contains a zero of phi."""
    if not qc.generic:
        raise NotGeneric("Q is not generic; perturb first")
    n = qc.n
    phi = qc.phi
    for chain in _chains(qc):
        vals = [phi[F.key] for F in chain]
        # each coordinate must change sign (or vanish) over the chain
        if any(min(v[i] for v in vals) > 0 or max(v[i] for v in vals) < 0 for i in range(n)):
            continue
        A_eq = [[v[i] for v in vals] for i in range(n)] + [[1] * n]
        b_eq = [0] * n + [1]
        A_ub = [[-int(j == k) for j in range(n)] for k in range(n)]
        res = lp_feasible(LinearSystem(n, A_ub, [0] * n, A_eq, b_eq))
        if isinstance(res, Infeasible):
            continue
        t = res.witness
        D = len(chain[0].sample)
        z = tuple(sum((tk * F.sample[c] for tk, F in zip(t, chain)), Fraction(0)) for c in range(D))
        return Chain(chain, t), z
    raise SoundnessError("phi has no zero on the (n-1)-skeleton of a generic Q")


@dataclass
class Descent:
    vertex: Face
    label: tuple
    steps: tuple  # i_1..i_{n-1}
    j: int
    r: Fraction

    def to_json(self) -> dict:
        return {
            "vertex": list(self.vertex.key),
            "steps": list(self.steps),
            "j": self.j,
            "r": fmt(self.r),
            "label_dims": [E.dim for E in self.label],
        }


def descend_to_vertex(qc: QComplex, chain: Chain) -> Descent:
    """Show the zero on ``chain`` is its bottom vertex; return that vertex."""
    n = qc.n
    faces, t = chain.faces, chain.t
    dims = [qc.label_dims(F) for F in faces]
    phi = [qc.phi[F.key] for F in faces]
    steps = []
    for k in range(1, len(faces)):
        diff = [a - b for a, b in zip(dims[k], dims[k - 1])]
        if sorted(diff) != [0] * (n - 1) + [1]:
            raise SoundnessError(f"chain step {k} does not raise exactly one label dimension: {diff}")
        steps.append(diff.index(1))
    free = [i for i in range(n) if i not in steps]
    if not free:
        raise SoundnessError("every index increases along the chain")
    j = free[0]
    for k in range(len(faces)):
        if phi[k][j] != phi[0][j] - Fraction(k, n):
            raise SoundnessError(f"phi_j does not drop by 1/n at step {k}")
    if any(x < 0 for x in t) or sum(t) != 1:
        raise SoundnessError("chain coordinates are not barycentric")
    if sum((tk * pk[j] for tk, pk in zip(t, phi)), Fraction(0)) != 0:
        raise SoundnessError("chain point is not a zero of phi_j")
    r = sum((t[k] * Fraction(k, n) for k in range(1, len(faces))), Fraction(0))
    if not 0 <= r < 1:
        raise SoundnessError("r outside [0, 1)")
    if phi[0][j].denominator != 1 or r != phi[0][j]:
        raise SoundnessError("phi_j at the bottom vertex is not the integer r")
    if r != 0:
        raise SoundnessError(f"r = {r} is a nonzero integer in [0, 1)")
    if tuple(t) != (1,) + (0,) * (len(t) - 1):
        raise SoundnessError(f"zero is not at the bottom vertex: t = {fmt_vec(t)}")
    v = faces[0]
    label = qc.label(v)
    if any(E.dim != qc.d for E in label):
        raise SoundnessError("bottom vertex label is not all d-faces")
    return Descent(v, label, tuple(steps), j, r)


def check_equivariance(qc: QComplex) -> list[str]:
    """Failures of the cyclic column shift; empty means the check passes."""
    n = qc.n
    Q = qc.Q
    idx = {v: i for i, v in enumerate(Q.vertices)}

    def shift(y):
        cols = qc.columns(y)
        moved = [cols[(i - 1) % n] for i in range(n)]
        return tuple(x for c in moved[:-1] for x in c)

    image = {}
    for i, v in enumerate(Q.vertices):
        gv = shift(v)
        if gv not in idx:
            return [f"shift of vertex {i} is not a vertex of Q"]
        image[i] = idx[gv]
    phi = qc.phi
    fails = []
    top = Q.lattice.top
    for F in Q.lattice:
        gm = 0
        for i in F.vertex_indices():
            gm |= 1 << image[i]
        G = Q.lattice.by_mask.get(gm)
        if G is None:
            fails.append(f"image of face {F.key} is not a face")
            continue
        lf, lg = qc.label(F), qc.label(G)
        if any(lg[i].tight_facets != lf[(i - 1) % n].tight_facets for i in range(n)):
            fails.append(f"labels of face {F.key} do not shift")
        if F is not top:
            pf, pg = phi[F.key], phi[G.key]
            if any(pg[i] != pf[(i - 1) % n] for i in range(n)):
                fails.append(f"phi on face {F.key} is not equivariant")
            if sum(pg) != 0:
                fails.append(f"phi on face {G.key} leaves the zero-sum plane")
    return fails


# ---------------------------------------------------------------------------
# pipeline


@dataclass(frozen=True)
class ProofConfig:
    start_magnitude: Fraction = Fraction(1, 1024)
    retries: int = 20
    approach_steps: int = 20


def _stage(trace: Trace | None, **rec):
    if trace is not None:
        trace(rec)


def _prove_interior(P: HPolytope, q: RVector, n: int, d: int, seed: int, cfg: ProofConfig,
                    trace: Trace | None, certify_at: RVector):
    """Run the proof at interior ``q``; return a Decomposition of ``certify_at`` or None."""
    P0, boundary = normalize_to_unit_form(P, q)
    assert not boundary
    _stage(trace, stage="normalize", point=fmt_vec(q))
    magnitude = Fraction(0)
    for attempt in range(cfg.retries + 1):
        try:
            Pe = perturb(P0, seed + attempt, magnitude)
        except PerturbationTooLarge as e:
            _stage(trace, stage="perturb", magnitude=fmt(magnitude), seed=seed + attempt, error=str(e))
            magnitude = cfg.start_magnitude if magnitude == 0 else magnitude / 2
            continue
        _stage(trace, stage="perturb", magnitude=fmt(magnitude), seed=seed + attempt)
        qc = build_q(Pe, n)
        viol = qc.violations
        _stage(trace, stage="genericity", generic=not viol, violations=len(viol), q_f_vector=qc.Q.lattice.f_vector())
        if viol:
            magnitude = cfg.start_magnitude if magnitude == 0 else magnitude / 2
            continue
        chain, z = find_phi_zero(qc)
        _stage(trace, stage="chain", **chain.to_json())
        desc = descend_to_vertex(qc, chain)
        _stage(trace, stage="descent", **desc.to_json())
        tight = [E.tight_facets for E in desc.label]
        if magnitude == 0 and certify_at == q:
            pts = tuple(tuple(a + b for a, b in zip(c, q)) for c in qc.columns(desc.vertex.sample))
            faces = tuple(P.lattice.by_tight[T] for T in tight)
            w = Fraction(1, n)
            dec = Decomposition(q, pts, faces, (w,) * n, (d,) * n, {"attempts": attempt + 1})
            _stage(trace, stage="result", tuple=[sorted(T) for T in tight], certified="direct")
            return dec
        faces = []
        for T in tight:
            mask = (1 << len(P.vertices)) - 1
            for k in T:
                mask &= P.facet_masks[k]
            F = P.lattice.by_mask.get(mask)
            if F is None or F.dim > d:
                faces = None
                break
            faces.append(F)
        if faces is not None:
            res = tuple_feasible(P, faces, certify_at, skeleton_dims=[d] * n)
            if isinstance(res, Decomposition):
                res.stats["attempts"] = attempt + 1
                _stage(trace, stage="result", tuple=[sorted(T) for T in tight], certified="tuple_feasible")
                return res
        _stage(trace, stage="recertify", ok=False, tuple=[sorted(T) for T in tight])
        if magnitude == 0:
            # an unperturbed generic instance always yields this same tuple
            return None
        magnitude /= 2
    return None


def decompose_via_proof(P: HPolytope, p: Sequence, n: int, d: int, seed: int = 0,
                        cfg: ProofConfig = ProofConfig(), trace: Trace | None = None) -> Decomposition:
    """Decomposition of ``p`` obtained by running the proof (n prime)."""
    p = vec(p)
    if P.ambient_dim != n * d:
        raise ValueError(f"polytope dimension {P.ambient_dim} != n*d = {n * d}")
    if not is_prime(n):
        raise ValueError(f"the proof pipeline needs prime n, got {n}")
    here = minimal_face(P, p)
    if not isinstance(here, Face):
        raise OutsideError(f"target violates facet inequality {here.row}", here.row)
    if here.dim <= d:
        _stage(trace, stage="result", certified="target already in a d-face")
        return repeated(P, p, n, d)
    if here.dim == P.ambient_dim:
        dec = _prove_interior(P, p, n, d, seed, cfg, trace, p)
    else:
        # boundary target: approach it from the interior and certify at the limit
        c = P.centroid
        dec = None
        delta = Fraction(1, 2)
        for _ in range(cfg.approach_steps):
            q = tuple(a + delta * (b - a) for a, b in zip(p, c))
            _stage(trace, stage="approach", delta=fmt(delta))
            dec = _prove_interior(P, q, n, d, seed, cfg, trace, p)
            if dec is not None:
                break
            delta /= 2
    if dec is None:
        raise SoundnessError("perturbation retries exhausted without a certified tuple")
    return dec
