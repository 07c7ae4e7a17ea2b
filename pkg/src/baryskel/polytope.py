"""Bounded convex polytopes: H/V descriptions, face lattices, point location.

Vertices are computed with an exact double-description method on the
homogenised cone.  Faces are identified by their set of tight facets; the
lattice is generated top-down by intersecting each face with the facets.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

from .linalg import (
    RVector,
    affine_rank,
    barycenter,
    dot,
    fmt_vec,
    independent_rows,
    mat,
    primitive,
    rank,
    rank_nullspace,
    rref,
    sub,
    to_fraction,
    vec,
)


class PolytopeError(ValueError):
    """Invalid polytope input (empty, unbounded, malformed)."""


class NotFullDimensional(PolytopeError):
    def __init__(self, msg, point, basis):
        super().__init__(msg)
        self.point = point
        self.basis = basis


class OutsideError(PolytopeError):
    def __init__(self, msg, row):
        super().__init__(msg)
        self.row = row


# ---------------------------------------------------------------------------
# double description


def _popcount(x: int) -> int:
    return bin(x).count("1")


def extreme_rays(M: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Extreme rays of the pointed cone ``{y : M y >= 0}``.

    ``M`` is an integer matrix.  Rows are inserted in index order after an
    initial simplicial cone built from the first independent rows.  Raises
    :class:`PolytopeError` if the cone has a lineality space.
    """
    k = len(M[0])
    init = independent_rows(M)
    if len(init) < k:
        raise PolytopeError("cone is not pointed (constraint matrix is rank deficient)")
    init = init[:k]
    # rays of the initial cone are the columns of the inverse of M[init]
    B = [[Fraction(x) for x in M[i]] for i in init]
    aug = [row + [Fraction(int(i == j)) for j in range(k)] for i, row in enumerate(B)]
    for c in range(k):
        piv = next(i for i in range(c, k) if aug[i][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for i in range(k):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    rays = [primitive([aug[i][k + j] for i in range(k)]) for j in range(k)]

    def zero_mask(ray, rows_idx):
        m = 0
        for i in rows_idx:
            if sum(a * b for a, b in zip(M[i], ray)) == 0:
                m |= 1 << i
        return m

    done = list(init)
    zs = [zero_mask(r, done) for r in rays]
    init_set = set(init)
    for i in range(len(M)):
        if i in init_set:
            continue
        row = M[i]
        vals = [sum(a * b for a, b in zip(row, r)) for r in rays]
        pos = [j for j, v in enumerate(vals) if v > 0]
        neg = [j for j, v in enumerate(vals) if v < 0]
        zer = [j for j, v in enumerate(vals) if v == 0]
        new_rays = [rays[j] for j in pos] + [rays[j] for j in zer]
        new_zs = [zs[j] for j in pos] + [zs[j] | (1 << i) for j in zer]
        if pos and neg:
            need = k - 2
            for p in pos:
                zp = zs[p]
                for q in neg:
                    common = zp & zs[q]
                    if _popcount(common) < need:
                        continue
                    if any(
                        (zs[w] & common) == common for w in range(len(rays)) if w != p and w != q
                    ):
                        continue
                    vp, vq = vals[p], vals[q]
                    comb = [vp * b - vq * a for a, b in zip(rays[p], rays[q])]
                    g = 0
                    for x in comb:
                        g = gcd(g, x)
                    new_rays.append(tuple(x // g for x in comb))
                    new_zs.append(common | (1 << i))
        rays, zs = new_rays, new_zs
        done.append(i)
    return rays


def _int_rows(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    return [list(primitive(r)) if any(r) else [0] * len(r) for r in rows]


# ---------------------------------------------------------------------------
# faces


@dataclass(frozen=True)
class Face:
    tight_facets: frozenset
    dim: int
    sample: RVector
    vertex_mask: int

    @property
    def key(self) -> tuple:
        return tuple(sorted(self.tight_facets))

    def vertex_indices(self) -> list[int]:
        m, out, i = self.vertex_mask, [], 0
        while m:
            if m & 1:
                out.append(i)
            m >>= 1
            i += 1
        return out

    def __lt__(self, other: "Face"):
        return (self.dim, self.key) < (other.dim, other.key)

    def to_json(self) -> dict:
        return {"tight_facets": list(self.key), "dim": self.dim}


class FaceLattice:
    """All nonempty faces of a polytope, graded by dimension.

    ``by_dim[k]`` lists the k-faces in canonical order (sorted tight-facet
    tuples).  The top face (the polytope) has no tight facets.
    """

    def __init__(self, faces: Iterable[Face], ambient_dim: int):
        self.ambient_dim = ambient_dim
        self.by_dim: list[list[Face]] = [[] for _ in range(ambient_dim + 1)]
        self.by_tight: dict[frozenset, Face] = {}
        self.by_mask: dict[int, Face] = {}
        for f in faces:
            self.by_dim[f.dim].append(f)
            self.by_tight[f.tight_facets] = f
            self.by_mask[f.vertex_mask] = f
        for lst in self.by_dim:
            lst.sort()

    @property
    def top(self) -> Face:
        return self.by_dim[self.ambient_dim][0]

    def f_vector(self) -> list[int]:
        return [len(x) for x in self.by_dim]

    def __iter__(self):
        for lst in self.by_dim:
            yield from lst

    def __len__(self):
        return sum(len(x) for x in self.by_dim)

    @staticmethod
    def contains(big: Face, small: Face) -> bool:
        return small.vertex_mask & big.vertex_mask == small.vertex_mask

    def subfaces(self, face: Face, dim: int) -> list[Face]:
        return [g for g in self.by_dim[dim] if self.contains(face, g)]

    def superfaces(self, face: Face, dim: int) -> list[Face]:
        return [g for g in self.by_dim[dim] if self.contains(g, face)]


# ---------------------------------------------------------------------------
# polytopes


class HPolytope:
    """A full-dimensional bounded polytope ``{x : A x <= b}``.

    Construction validates boundedness and full dimensionality and drops
    redundant rows (keeping the first of duplicate facets), so ``A`` and
    ``b`` are an irredundant facet description afterwards.
    """

    def __init__(self, A, b):
        A = mat(A)
        b = vec(b)
        if not A:
            raise PolytopeError("no inequalities: polytope is unbounded")
        if len(A) != len(b):
            raise PolytopeError("A and b have different row counts")
        D = len(A[0])
        if D == 0:
            raise PolytopeError("ambient dimension must be positive")
        for i, (row, bi) in enumerate(zip(A, b)):
            if not any(row) and bi < 0:
                raise PolytopeError(f"row {i} reads 0 <= {bi}: polytope is empty")
        verts = _vertices_of(A, b)
        rk = affine_rank(verts)
        if rk < D:
            p0 = verts[0]
            basis = _rowspace([sub(v, p0) for v in verts[1:]])
            raise NotFullDimensional(
                f"polytope has dimension {rk} < {D}; affine hull through {fmt_vec(p0)}",
                p0,
                basis,
            )
        keep: list[int] = []
        seen: set[int] = set()
        masks = []
        for i, (row, bi) in enumerate(zip(A, b)):
            m = 0
            tight = []
            for j, v in enumerate(verts):
                if dot(row, v) == bi:
                    m |= 1 << j
                    tight.append(v)
            if m in seen or len(tight) < D:
                continue
            if affine_rank(tight) == D - 1:
                keep.append(i)
                seen.add(m)
                masks.append(m)
        self.A: tuple = tuple(A[i] for i in keep)
        self.b: RVector = tuple(b[i] for i in keep)
        self.ambient_dim = D
        self.vertices: tuple = tuple(verts)
        self.facet_masks: tuple = tuple(masks)

    @property
    def n_facets(self) -> int:
        return len(self.A)

    def __repr__(self):
        return f"HPolytope(dim={self.ambient_dim}, facets={self.n_facets}, vertices={len(self.vertices)})"

    def __eq__(self, other):
        return isinstance(other, HPolytope) and (self.A, self.b) == (other.A, other.b)

    def __hash__(self):
        return hash((self.A, self.b))

    def slacks(self, x: Sequence) -> RVector:
        return tuple(bi - dot(a, x) for a, bi in zip(self.A, self.b))

    def contains(self, x: Sequence) -> bool:
        return all(s >= 0 for s in self.slacks(x))

    def tight_set(self, x: Sequence) -> frozenset:
        return frozenset(i for i, s in enumerate(self.slacks(x)) if s == 0)

    @cached_property
    def lattice(self) -> FaceLattice:
        return face_lattice(self)

    @cached_property
    def centroid(self) -> RVector:
        """Average of the vertices; always an interior point."""
        return barycenter(self.vertices)

    def face_vertices(self, face: Face) -> list[RVector]:
        return [self.vertices[i] for i in face.vertex_indices()]

    def to_json(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "hrep": {"A": [fmt_vec(r) for r in self.A], "b": fmt_vec(self.b)},
        }


def _rowspace(rows):
    R, _ = rref(rows) if rows else ([], [])
    return [tuple(r) for r in R]


def _vertices_of(A, b) -> list[RVector]:
    D = len(A[0])
    rows = [[bi] + [-a for a in row] for row, bi in zip(A, b)]
    rows.append([Fraction(1)] + [Fraction(0)] * D)
    M = _int_rows(rows)
    try:
        rays = extreme_rays(M)
    except PolytopeError:
        raise PolytopeError("polytope is unbounded or empty (A does not have full column rank)")
    verts, unbounded = [], False
    for r in rays:
        if r[0] > 0:
            verts.append(tuple(Fraction(x, r[0]) for x in r[1:]))
        else:
            unbounded = True
    if not verts:
        raise PolytopeError("polytope is empty")
    if unbounded:
        raise PolytopeError("polytope is unbounded")
    verts.sort()
    return verts


@dataclass(frozen=True)
class VPolytope:
    vertices: tuple
    ambient_dim: int

    @classmethod
    def from_points(cls, pts) -> "VPolytope":
        pts = tuple(vec(p) for p in pts)
        if not pts:
            raise PolytopeError("no vertices")
        D = len(pts[0])
        if any(len(p) != D for p in pts):
            raise PolytopeError("vertices of mixed length")
        if len(set(pts)) != len(pts):
            raise PolytopeError("duplicate vertices")
        return cls(pts, D)

    def to_json(self) -> dict:
        return {"ambient_dim": self.ambient_dim, "vrep": {"vertices": [fmt_vec(v) for v in self.vertices]}}


def h_from_v(V: VPolytope) -> HPolytope:
    pts = list(V.vertices)
    D = V.ambient_dim
    rk = affine_rank(pts)
    if rk < D:
        p0 = pts[0]
        raise NotFullDimensional(
            f"points span an affine space of dimension {rk} < {D}; affine hull through {fmt_vec(p0)}",
            p0,
            _rowspace([sub(v, p0) for v in pts[1:]]),
        )
    rows = [[Fraction(1)] + [-x for x in p] for p in pts]
    rays = extreme_rays(_int_rows(rows))
    A = [[Fraction(x) for x in r[1:]] for r in rays]
    b = [Fraction(r[0]) for r in rays]
    order = sorted(range(len(A)), key=lambda i: (A[i], b[i]))
    P = HPolytope([A[i] for i in order], [b[i] for i in order])
    extra = set(pts) - set(P.vertices)
    if extra:
        raise PolytopeError(f"{len(extra)} listed point(s) are not extreme, e.g. {fmt_vec(sorted(extra)[0])}")
    return P


def dual_description(P: HPolytope | VPolytope) -> HPolytope | VPolytope:
    """Convert between H and V descriptions."""
    if isinstance(P, HPolytope):
        return VPolytope(P.vertices, P.ambient_dim)
    if isinstance(P, VPolytope):
        return h_from_v(P)
    raise TypeError(f"not a polytope: {type(P).__name__}")


# ---------------------------------------------------------------------------
# lattice and queries


def face_lattice(P: HPolytope) -> FaceLattice:
    D = P.ambient_dim
    fm = P.facet_masks
    nv = len(P.vertices)
    full = (1 << nv) - 1

    def make(mask: int, dim: int) -> Face:
        tight = frozenset(i for i, m in enumerate(fm) if m & mask == mask)
        pts = [P.vertices[i] for i in range(nv) if mask >> i & 1]
        return Face(tight, dim, barycenter(pts), mask)

    faces = {full: make(full, D)}
    level = [full]
    for dim in range(D - 1, -1, -1):
        nxt: dict[int, None] = {}
        for mask in level:
            cands = {mask & m for m in fm if mask & m != mask and mask & m}
            for c in cands:
                if not any(c != o and c & o == c for o in cands):
                    nxt[c] = None
        level = sorted(nxt)
        for m in level:
            faces[m] = make(m, dim)
    return FaceLattice(faces.values(), D)


def skeleton(P: HPolytope, d: int) -> list[Face]:
    """The d-dimensional faces of ``P``; their union is the d-skeleton."""
    if not 0 <= d <= P.ambient_dim:
        raise ValueError(f"skeleton dimension {d} outside [0, {P.ambient_dim}]")
    return list(P.lattice.by_dim[d])


@dataclass(frozen=True)
class Outside:
    row: int

    def __bool__(self):
        return False


def minimal_face(P: HPolytope, x: Sequence) -> Face | Outside:
    """The face whose relative interior contains ``x``."""
    x = vec(x)
    if len(x) != P.ambient_dim:
        raise ValueError("point has the wrong dimension")
    tight = []
    for i, s in enumerate(P.slacks(x)):
        if s < 0:
            return Outside(i)
        if s == 0:
            tight.append(i)
    return P.lattice.by_tight[frozenset(tight)]


def containing_face(P: HPolytope, x: Sequence, dim: int) -> Face:
    """First face of dimension ``dim`` (canonical order) that contains ``x``."""
    f = minimal_face(P, x)
    if isinstance(f, Outside):
        raise OutsideError(f"point violates row {f.row}", f.row)
    if f.dim == dim:
        return f
    for g in P.lattice.by_dim[dim]:
        if FaceLattice.contains(g, f):
            return g
    raise ValueError(f"no {dim}-face contains a point of the {f.dim}-face")


def normalize_to_unit_form(P: HPolytope, p: Sequence) -> tuple[HPolytope, bool]:
    """Translate ``p`` to the origin.

    For interior ``p`` each row is also rescaled so the offsets are all 1.
    Returns ``(P0, boundary)``; when ``boundary`` is True only the translation
    was applied because some offsets are zero.
    """
    p = vec(p)
    s = P.slacks(p)
    for i, si in enumerate(s):
        if si < 0:
            raise OutsideError(f"target violates row {i} by {-si}", i)
    if all(si > 0 for si in s):
        return HPolytope([[a / si for a in row] for row, si in zip(P.A, s)], [1] * len(s)), False
    return HPolytope(P.A, s), True


# ---------------------------------------------------------------------------
# affine re-embedding of faces


@dataclass(frozen=True)
class Embedding:
    """``x = origin + basis^T y`` maps local coordinates of a face to ``P``."""

    origin: RVector
    basis: tuple  # local_dim vectors of length D
    coords: tuple  # original coordinates used as local ones
    local: HPolytope
    row_map: tuple  # local row -> row of P

    def to_global(self, y: Sequence) -> RVector:
        D = len(self.origin)
        return tuple(
            self.origin[i] + sum((y[k] * self.basis[k][i] for k in range(len(y))), Fraction(0))
            for i in range(D)
        )

    def to_local(self, x: Sequence) -> RVector:
        return tuple(Fraction(x[c]) - self.origin[c] for c in self.coords)


def embed_face(P: HPolytope, face: Face) -> Embedding:
    """Express ``face`` as a full-dimensional polytope in its affine hull.

    Local coordinates are the free coordinates of the tight system, so the
    map back to ``P`` is the identity on them.
    """
    D = P.ambient_dim
    tight = sorted(face.tight_facets)
    origin = P.vertices[face.vertex_indices()[0]]
    if tight:
        _, basis = rank_nullspace([P.A[i] for i in tight])
        _, pivots = rref([P.A[i] for i in tight])
        coords = tuple(j for j in range(D) if j not in pivots)
    else:
        basis = [tuple(Fraction(int(i == j)) for j in range(D)) for i in range(D)]
        coords = tuple(range(D))
    rows, rhs, rmap = [], [], []
    for i, (a, bi) in enumerate(zip(P.A, P.b)):
        if i in face.tight_facets:
            continue
        r = tuple(dot(a, v) for v in basis)
        if not any(r):
            continue
        rows.append(r)
        rhs.append(bi - dot(a, origin))
        rmap.append(i)
    local = HPolytope(rows, rhs)
    # HPolytope may drop rows; recover which original row each survivor came from
    kept = []
    for r, c in zip(local.A, local.b):
        kept.append(rmap[next(i for i, (rr, cc) in enumerate(zip(rows, rhs)) if rr == r and cc == c)])
    return Embedding(origin, tuple(basis), coords, local, tuple(kept))


# ---------------------------------------------------------------------------
# JSON


def _parse_rows(rows) -> list[list[Fraction]]:
    return [[to_fraction(x) for x in r] for r in rows]


def polytope_from_json(data: dict) -> HPolytope:
    """Parse the polytope file format; both descriptions must agree when given."""
    if not isinstance(data, dict) or "ambient_dim" not in data:
        raise PolytopeError("polytope JSON needs 'ambient_dim'")
    D = data["ambient_dim"]
    if not isinstance(D, int) or D < 1:
        raise PolytopeError("ambient_dim must be a positive integer")
    H = V = None
    try:
        if "hrep" in data:
            A = _parse_rows(data["hrep"]["A"])
            b = [to_fraction(x) for x in data["hrep"]["b"]]
            if any(len(r) != D for r in A):
                raise PolytopeError("hrep row length differs from ambient_dim")
            H = HPolytope(A, b)
        if "vrep" in data:
            pts = _parse_rows(data["vrep"]["vertices"])
            if any(len(r) != D for r in pts):
                raise PolytopeError("vertex length differs from ambient_dim")
            V = VPolytope.from_points(pts)
    except (KeyError, TypeError) as e:
        raise PolytopeError(f"malformed polytope JSON: {e}") from None
    if H is None and V is None:
        raise PolytopeError("polytope JSON needs 'hrep' or 'vrep'")
    if H is None:
        return h_from_v(V)
    if V is not None and set(V.vertices) != set(H.vertices):
        raise PolytopeError("hrep and vrep describe different polytopes")
    return H


def load_polytope(path) -> HPolytope:
    with open(path) as fh:
        return polytope_from_json(json.load(fh))


# ---------------------------------------------------------------------------
# standard instances


def cube(D: int, lo=-1, hi=1) -> HPolytope:
    A, b = [], []
    for i in range(D):
        e = [0] * D
        e[i] = 1
        A.append(list(e))
        b.append(hi)
        e[i] = -1
        A.append(list(e))
        b.append(-lo)
    return HPolytope(A, b)


def simplex(D: int) -> HPolytope:
    """conv(0, e_1, ..., e_D)."""
    A = [[-int(i == j) for j in range(D)] for i in range(D)] + [[1] * D]
    return HPolytope(A, [0] * D + [1])


def cross_polytope(D: int) -> HPolytope:
    from itertools import product

    A = [list(s) for s in product((-1, 1), repeat=D)]
    return HPolytope(A, [1] * len(A))


def polygon(points) -> HPolytope:
    return h_from_v(VPolytope.from_points(points))
