import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from baryskel.certificate import check_certificate
from baryskel.instances import random_polytope, sample_targets
from baryskel.lp import Infeasible, SoundnessError
from baryskel.polytope import OutsideError, cube, minimal_face, simplex
from baryskel.solver import (
    BudgetExceeded,
    Decomposition,
    SolverConfig,
    decompose,
    decompose_prime,
    enumerate_tuples,
    mixed_decompose,
    mixed_shape,
    search,
    tuple_feasible,
    tuple_system,
)

from oracles import edge_segments, midpoint_pair_exact


def edge(P, pts):
    for F in P.lattice.by_dim[1]:
        if set(P.face_vertices(F)) == set(pts):
            return F
    raise KeyError(pts)


def valid(P, dec):
    return check_certificate(P, dec.to_json()) == []


def test_square_opposite_edges(square):
    top = edge(square, [(-1, 1), (1, 1)])
    bottom = edge(square, [(-1, -1), (1, -1)])
    res = tuple_feasible(square, [top, bottom], (0, 0))
    assert isinstance(res, Decomposition)
    assert res.points[0][1] == 1 and res.points[1][1] == -1
    assert res.residual() == (0, 0)


def test_square_same_edge_twice_refuted(square):
    top = edge(square, [(-1, 1), (1, 1)])
    res = tuple_feasible(square, [top, top], (0, 0))
    assert isinstance(res, Infeasible)
    sys, _ = tuple_system(square, [top, top], (0, 0), [Fraction(1, 2)] * 2)
    assert sys.refuted_by(res.farkas)


def test_cube4_pairs_at_half():
    C = cube(4)
    p = (Fraction(1, 2), 0, 0, 0)
    faces = C.lattice.by_dim[2]
    feasible = []
    for F, G in itertools.product(faces, repeat=2):
        res = tuple_feasible(C, [F, G], p)
        if isinstance(res, Decomposition):
            assert valid(C, res)
            feasible.append((F, G))
    assert feasible
    # x1 + x2 = (1, 0, 0, 0) with every point in [-1,1]^4 having two coordinates at +-1
    for F, G in feasible:
        fixed = lambda H: {i for i in range(4) if len({v[i] for v in C.face_vertices(H)}) == 1}  # noqa: E731
        assert len(fixed(F)) == 2 and len(fixed(G)) == 2


def test_target_in_d_face_is_repeated(square):
    dec = decompose_prime(square, (1, Fraction(1, 5)), 2, 1)
    assert dec.points == ((1, Fraction(1, 5)),) * 2
    assert dec.stats["tuples_tried"] == 0
    assert valid(square, dec)


def test_square_off_center_against_oracle(square):
    p = (Fraction(1, 4), Fraction(1, 3))
    segs = edge_segments(square)
    assert any(midpoint_pair_exact(s1, s2, p) for (_, s1), (_, s2) in itertools.product(segs, repeat=2))
    dec = decompose(square, p, 2)
    assert dec.residual() == (0, 0)
    assert valid(square, dec)
    (_, s1), (_, s2) = [(F, tuple(square.face_vertices(F))) for F in dec.faces]
    assert midpoint_pair_exact(s1, s2, p)


@pytest.mark.parametrize("seed", range(3))
def test_random_4polytope_interior(seed):
    P = random_polytope(100 + seed, 4, 9)
    for p in sample_targets(P, seed, count=4):
        dec = decompose(P, p, 2)
        assert valid(P, dec)
        assert all(F.dim <= 2 for F in dec.faces)


def test_n_equals_one(square):
    p = (Fraction(1, 3), Fraction(-1, 7))
    dec = decompose(square, p, 1)
    assert dec.points == (p,)
    assert valid(square, dec)


def test_composite_cube4_origin():
    C = cube(4)
    dec = decompose(C, (0, 0, 0, 0), 4)
    assert dec.n == 4
    assert set(dec.weights) == {Fraction(1, 4)}
    assert all(F.dim <= 1 for F in dec.faces)
    assert tuple(sum(c) for c in zip(*dec.points)) == (0, 0, 0, 0)
    assert valid(C, dec)


def test_composite_random():
    P = random_polytope(7, 4, 10)
    for p in sample_targets(P, 3, count=3):
        dec = decompose(P, p, 4)
        assert valid(P, dec) and dec.skeleton_dims == (1, 1, 1, 1)


def test_mixed_cube4():
    C = cube(4)
    p = (Fraction(1, 3), Fraction(-1, 5), 0, Fraction(1, 2))
    dec = mixed_decompose(C, p, [2, 2])
    assert dec.weights == (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4))
    assert dec.skeleton_dims == (2, 1, 1)
    assert dec.faces[0].dim <= 2 and dec.faces[1].dim <= 1 and dec.faces[2].dim <= 1
    assert valid(C, dec)


def test_mixed_shape_fifteen():
    w, d = mixed_shape(15, [5, 3])
    assert w == [Fraction(1, 5)] * 4 + [Fraction(1, 15)] * 3
    assert d == [3, 3, 3, 3, 1, 1, 1]
    assert sum(w) == 1


def test_single_stage_chain_matches_decompose():
    P = random_polytope(3, 2, 6)
    p = sample_targets(P, 1, count=1)[0]
    assert mixed_decompose(P, p, [2]).to_json() == decompose(P, p, 2).to_json()


def test_symmetry_and_order_never_change_feasibility():
    P = random_polytope(9, 2, 7)
    faces = P.lattice.by_dim[1]
    half = [Fraction(1, 2)] * 2
    for p in sample_targets(P, 2, count=6):
        results = set()
        for order in ("heuristic", "canonical"):
            for sym in (True, False):
                dec = search(P, [faces, faces], p, half, SolverConfig(order=order, symmetry=sym), [1, 1])
                results.add(dec is not None)
                if dec is not None:
                    assert valid(P, dec)
        assert results == {True}


def test_parallel_matches_serial():
    P = random_polytope(4, 3, 8)
    for p in sample_targets(P, 5, count=4):
        a = decompose(P, p, 3, SolverConfig())
        b = decompose(P, p, 3, SolverConfig(parallel=True, threads=3))
        assert a.to_json() == b.to_json()


def test_budget():
    C = cube(4)
    p = (Fraction(1, 3), Fraction(1, 5), Fraction(1, 7), Fraction(1, 11))
    with pytest.raises(BudgetExceeded):
        search(C, [C.lattice.by_dim[2]] * 2, p, [Fraction(1, 2)] * 2,
               SolverConfig(order="canonical", budget=1), [2, 2])


def test_enumerate_tuples_symmetry():
    full = enumerate_tuples([3, 3], [0, 0], False)
    half = enumerate_tuples([3, 3], [0, 0], True)
    assert len(full) == 9 and len(half) == 6
    assert all(a <= b for a, b in half)


def test_input_errors(square):
    with pytest.raises(ValueError):
        decompose(square, (0, 0), 3)
    with pytest.raises(ValueError):
        decompose_prime(cube(4), (0, 0, 0, 0), 4, 1)
    with pytest.raises(OutsideError):
        decompose(square, (2, 0), 2)
    with pytest.raises(ValueError):
        decompose(square, (0, 0, 0), 2)
    with pytest.raises(ValueError):
        SolverConfig(order="random")


def test_exhaustion_raises_soundness_error(monkeypatch):
    import baryskel.solver as solver

    monkeypatch.setattr(solver, "search", lambda *a, **k: None)
    with pytest.raises(SoundnessError):
        solver.decompose_prime(cube(2), (Fraction(1, 3), 0), 2, 1)


coord = st.integers(-15, 15).map(lambda k: Fraction(k, 16))


@settings(max_examples=25, deadline=None)
@given(st.tuples(coord, coord, coord), st.integers(0, 2), st.integers(-3, 3))
def test_certificates_reject_tampering(p, which, delta):
    P = cube(3)
    dec = decompose(P, p, 3)
    cert = dec.to_json()
    assert check_certificate(P, cert) == []
    if delta == 0:
        return
    bad = {**cert, "points": [list(x) for x in cert["points"]]}
    i, c = which, (which + 1) % 3
    bad["points"][i][c] = str(Fraction(bad["points"][i][c]) + Fraction(delta, 7))
    assert check_certificate(P, bad)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_simplex3_any_target(seed):
    P = simplex(3)
    p = sample_targets(P, seed, count=1)[0]
    dec = decompose(P, p, 3)
    assert valid(P, dec)
    assert minimal_face(P, p)
