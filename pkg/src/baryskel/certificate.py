"""Independent re-check of decomposition certificates.

Uses only the facet description of the polytope and exact rank; it does not
trust anything the solver computed besides the numbers in the certificate.
"""
from __future__ import annotations

from fractions import Fraction

from .linalg import dot, rank, to_fraction
from .polytope import HPolytope


def check_certificate(P: HPolytope, cert: dict) -> list[str]:
    """Problems found in ``cert`` (certificate JSON as a dict); empty means valid."""
    errs: list[str] = []
    D = P.ambient_dim
    try:
        target = [to_fraction(x) for x in cert["target"]]
        weights = [to_fraction(x) for x in cert["weights"]]
        points = [[to_fraction(x) for x in pt] for pt in cert["points"]]
        faces = cert["faces"]
    except (KeyError, TypeError, ValueError) as e:
        return [f"malformed certificate: {e}"]
    n = len(points)
    if n == 0:
        return ["certificate has no points"]
    if not len(weights) == len(faces) == n:
        return ["weights, points and faces differ in length"]
    if len(target) != D or any(len(x) != D for x in points):
        return ["coordinate vectors do not match the polytope dimension"]
    skel = cert.get("skeleton_dims")
    if skel is None:
        if len(set(weights)) != 1 or D % n:
            return ["skeleton_dims missing and cannot be inferred"]
        skel = [D // n] * n
    if len(skel) != n:
        return ["skeleton_dims has the wrong length"]
    if any(w <= 0 for w in weights):
        errs.append("non-positive weight")
    if sum(weights, Fraction(0)) != 1:
        errs.append(f"weights sum to {sum(weights, Fraction(0))}, not 1")
    for c in range(D):
        s = sum((w * x[c] for w, x in zip(weights, points)), Fraction(0))
        if s != target[c]:
            errs.append(f"barycenter coordinate {c} is {s}, target {target[c]}")
    for i, (x, f) in enumerate(zip(points, faces)):
        try:
            tight = [int(k) for k in f["tight_facets"]]
            dim = int(f["dim"])
        except (KeyError, TypeError, ValueError):
            errs.append(f"point {i}: malformed face record")
            continue
        if any(not 0 <= k < P.n_facets for k in tight):
            errs.append(f"point {i}: facet index out of range")
            continue
        for k, (a, b) in enumerate(zip(P.A, P.b)):
            v = dot(a, x)
            if v > b:
                errs.append(f"point {i} violates facet {k}")
            elif k in tight and v != b:
                errs.append(f"point {i} is not on facet {k}")
        true_dim = D - rank([P.A[k] for k in tight]) if tight else D
        if true_dim != dim:
            errs.append(f"point {i}: face recorded with dim {dim}, tight rows give {true_dim}")
        if true_dim > int(skel[i]):
            errs.append(f"point {i}: face dimension {true_dim} exceeds skeleton dimension {skel[i]}")
    if cert.get("exact") is not True:
        errs.append("certificate does not claim exactness")
    return errs
