"""Exact barycentric decompositions of polytope points into skeleton points.

Every point of a convex polytope of dimension n*d is the barycenter of n
points of its d-skeleton.  This package finds such points with exact
rational arithmetic, emits checkable certificates, runs the topological
existence argument as a computation, and checks the known counterexamples.
"""
from .certificate import check_certificate
from .linalg import fmt, fmt_vec, to_fraction, vec
from .lp import Feasible, Infeasible, LinearSystem, SoundnessError, lp_feasible
from .polytope import (
    Face,
    FaceLattice,
    HPolytope,
    NotFullDimensional,
    OutsideError,
    PolytopeError,
    VPolytope,
    containing_face,
    cross_polytope,
    cube,
    dual_description,
    embed_face,
    face_lattice,
    h_from_v,
    load_polytope,
    minimal_face,
    normalize_to_unit_form,
    polygon,
    polytope_from_json,
    simplex,
    skeleton,
)
from .instances import random_polytope, sample_targets
from .solver import (
    BudgetExceeded,
    Decomposition,
    SolverConfig,
    decompose,
    decompose_prime,
    mixed_decompose,
    tuple_feasible,
)
from .proof import (
    NotGeneric,
    QComplex,
    build_q,
    check_genericity,
    decompose_via_proof,
    descend_to_vertex,
    find_phi_zero,
    perturb,
)
from .verify import (
    VerificationReport,
    falsify_mixed_skeleton_simplex,
    falsify_weighted_prism,
    verify_minkowski,
)

__version__ = "0.1.0"
