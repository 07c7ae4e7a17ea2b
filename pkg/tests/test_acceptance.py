"""Acceptance suite: eight criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` or as a script
(``python tests/test_acceptance.py``).  Thresholds are the ones the
criteria state; nothing here is loosened to make a run pass.
"""
from __future__ import annotations

import itertools
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import edge_segments, midpoint_pair_exact, midpoint_pair_sweep  # noqa: E402

import baryskel.proof as proof  # noqa: E402
from baryskel.certificate import check_certificate  # noqa: E402
from baryskel.instances import random_convex_point, random_polytope, sample_targets  # noqa: E402
from baryskel.linalg import rank  # noqa: E402
from baryskel.polytope import cube, minimal_face  # noqa: E402
from baryskel.solver import Decomposition, decompose, decompose_prime, tuple_feasible, tuple_system  # noqa: E402
from baryskel.verify import (  # noqa: E402
    falsify_mixed_skeleton_simplex,
    falsify_weighted_prism,
    grid_sampler,
    regular_simplex,
    triangular_prism,
    verify_minkowski,
)

THEOREM_CASES = [(2, 1), (2, 2), (3, 1)]
POLYS_PER_CASE = 50
TARGETS = 20
MAX_FACETS = 16
TIME_LIMIT = 300.0
PERTURB_MAGNITUDE = Fraction(1, 1024)
GENERIC_RATE = Fraction(95, 100)
MAX_HALVINGS = 20


def facet_count(seed: int, D: int, hi: int = 12) -> int:
    assert hi <= MAX_FACETS
    if D == 1:
        return 2
    return D + 1 + seed % (hi - D)


def exact_face_dim(P, face_json) -> int:
    tight = face_json["tight_facets"]
    return P.ambient_dim - rank([P.A[k] for k in tight]) if tight else P.ambient_dim


def certificate_ok(P, dec, d) -> bool:
    cert = dec.to_json()
    if check_certificate(P, cert):
        return False
    return cert["exact"] and all(exact_face_dim(P, f) <= d for f in cert["faces"])


# ---------------------------------------------------------------------------


def criterion_1():
    t0 = time.perf_counter()
    total = ok = 0
    for n, d in THEOREM_CASES:
        D = n * d
        for seed in range(POLYS_PER_CASE):
            P = random_polytope(1000 * D + seed, D, facet_count(seed, D))
            for p in sample_targets(P, seed, count=TARGETS):
                total += 1
                ok += certificate_ok(P, decompose(P, p, n), d)
    elapsed = time.perf_counter() - t0
    passed = ok == total and elapsed < TIME_LIMIT
    return passed, f"{ok}/{total} certificates exact, {elapsed:.1f}s (limit {TIME_LIMIT:.0f}s)"


def criterion_2():
    total = ok = 0
    for seed in range(10):
        P = random_polytope(5000 + seed, 4, facet_count(seed, 4))
        for p in sample_targets(P, seed, count=TARGETS):
            total += 1
            dec = decompose(P, p, 4)
            ok += certificate_ok(P, dec, 1) and dec.weights == (Fraction(1, 4),) * 4
    return ok == total, f"{ok}/{total} four-point certificates with weights 1/4"


_PROOF_RUNS: dict = {}


def _proof_instances():
    out = []
    for seed in range(20):
        out.append(random_polytope(7000 + seed, 2, facet_count(seed, 2)))
    for seed in range(5):
        out.append(random_polytope(7100 + seed, 4, 5 + seed % 4))
    return out


def _run_proofs():
    """Shared by criteria 3 and 4: every QComplex built along the way is kept."""
    if _PROOF_RUNS:
        return _PROOF_RUNS
    built = []
    real = proof.build_q

    def recording(P0, n):
        qc = real(P0, n)
        built.append(qc)
        return qc

    proof.build_q = recording
    try:
        runs = []
        for k, P in enumerate(_proof_instances()):
            rng = random.Random(k)
            p = random_convex_point(rng, P.vertices)
            while minimal_face(P, p).dim != P.ambient_dim:
                p = random_convex_point(rng, P.vertices)
            d = P.ambient_dim // 2
            recs = []
            a = proof.decompose_via_proof(P, p, 2, d, seed=k, trace=recs.append)
            b = decompose_prime(P, p, 2, d)
            runs.append((P, d, a, b, recs))
    finally:
        proof.build_q = real
    _PROOF_RUNS.update(runs=runs, built=built)
    return _PROOF_RUNS


def criterion_3():
    data = _run_proofs()
    certs = descents = generic = 0
    for P, d, a, b, recs in data["runs"]:
        certs += certificate_ok(P, a, d) and certificate_ok(P, b, d)
        chains = [r for r in recs if r["stage"] == "chain"]
        gens = [r for r in recs if r["stage"] == "genericity"]
        generic += bool(gens) and gens[-1]["generic"]
        descents += bool(chains) and all(r["t"] == ["1"] + ["0"] * (len(r["t"]) - 1) for r in chains) and any(
            r["stage"] == "descent" and r["r"] == "0" for r in recs)
    n = len(data["runs"])
    passed = certs == descents == generic == n
    return passed, f"{n} instances: {generic} generic, {certs} certificate pairs valid, {descents} descents with t=(1,0)"


def criterion_4():
    data = _run_proofs()
    zero_sum = integral = equiv = generic = 0
    built = data["built"]
    for qc in built:
        zero_sum += all(sum(v) == 0 for v in qc.phi.values())
        if qc.generic:
            generic += 1
            integral += all(
                qc.phi[v.key] == tuple(Fraction(E.dim - qc.d) for E in qc.label(v)) for v in qc.Q.lattice.by_dim[0]
            )
        equiv += not proof.check_equivariance(qc)
    n = len(built)
    passed = n > 0 and zero_sum == equiv == n and integral == generic
    return passed, f"{n} complexes: zero-sum {zero_sum}, equivariant {equiv}, integral vertex values {integral}/{generic} generic"


def criterion_5():
    sq = cube(2)
    centered_flagged = bool(proof.check_genericity(proof.build_q(sq, 2)))
    good = sum(proof.build_q(proof.perturb(sq, s, PERTURB_MAGNITUDE), 2).generic for s in range(100))
    worst = 0
    for s in range(100):
        recs = []
        dec = proof.decompose_via_proof(sq, (0, 0), 2, 1, seed=s, trace=recs.append)
        assert not check_certificate(sq, dec.to_json())
        halvings = sum(1 for r in recs if r["stage"] == "perturb") - 1
        worst = max(worst, halvings)
    passed = centered_flagged and Fraction(good, 100) >= GENERIC_RATE and worst <= MAX_HALVINGS
    return passed, f"centered square non-generic: {centered_flagged}; generic after perturbation {good}/100; max retries {worst}"


def criterion_6():
    fails = []
    sub_fail = 0
    cases = [(random_polytope(8000 + s, 2, 4), 2, 1) for s in range(10)]
    cases += [(random_polytope(8100 + s, 4, 5 + s % 4), 2, 2) for s in range(5)]
    for k, (P, n, d) in enumerate(cases):
        rep = verify_minkowski(P, n, d, samples=100, seed=k, sampler=grid_sampler)
        sub_fail += rep.notes["subset_ok"] != 100
        if not rep.verified:
            fails.append(k)
    return not fails and not sub_fail, f"{len(cases) - len(fails)}/{len(cases)} instances verified both ways; subset failures {sub_fail}"


def _certified_refutation(P, rep, weights, lists):
    """Every tuple of the candidate lists has a Farkas certificate that checks."""
    faces = {F.key: F for F in P.lattice}
    seen = set()
    for cert in rep.certificates:
        tup = [faces[tuple(k)] for k in cert["faces"]]
        sys_, _ = tuple_system(P, tup, rep.counterexample, weights)
        if not sys_.refuted_by([Fraction(y) for y in cert["farkas"]]):
            return False
        seen.add(tuple(tuple(k) for k in cert["faces"]))
    # coverage: every candidate tuple (up to swapping equal-weight slots) is refuted
    for tup in itertools.product(*lists):
        key = [list(F.key) for F in tup]
        groups = {}
        for i, w in enumerate(weights):
            groups.setdefault((id(lists[i]), w), []).append(i)
        canon = list(key)
        for idx in groups.values():
            vals = sorted(key[i] for i in idx)
            for i, v in zip(idx, vals):
                canon[i] = v
        if tuple(tuple(k) for k in canon) not in seen:
            return False
    return True


def criterion_7():
    parts = []
    prism = falsify_weighted_prism(Fraction(1, 10))
    P = triangular_prism()
    w = [Fraction(1, 1) / Fraction(31, 10), Fraction(1, 1) / Fraction(31, 10), Fraction(11, 10) / Fraction(31, 10)]
    edges = P.lattice.by_dim[1]
    prism_ok = (prism.counterexample is not None and P.contains(prism.counterexample)
                and _certified_refutation(P, prism, w, [edges] * 3))
    parts.append(f"prism eps=1/10: {'counterexample ' + str(prism.counterexample) if prism_ok else f'none in {prism.attempted} grid points'}")
    simp = falsify_mixed_skeleton_simplex(0, 3, 1)
    S = regular_simplex(3)
    simp_ok = (simp.counterexample == S.centroid
               and _certified_refutation(S, simp, [Fraction(1, 2)] * 2, [S.lattice.by_dim[0], S.lattice.by_dim[3]]))
    parts.append(f"simplex (0,3): centroid certified {simp_ok}")
    ext = falsify_mixed_skeleton_simplex(1, 2, 1, samples=100)
    ext_ok = ext.verified and ext.succeeded == 100
    parts.append(f"simplex (1,2): {ext.succeeded}/100 feasible")
    return prism_ok and simp_ok and ext_ok, "; ".join(parts)


def criterion_8():
    pairs = agree = sweep_conflicts = 0
    for seed in range(10):
        P = random_polytope(9000 + seed, 2, 3 + seed % 10)
        segs = edge_segments(P)
        for p in sample_targets(P, seed, count=10):
            for (F, s1), (G, s2) in itertools.product(segs, repeat=2):
                pairs += 1
                truth = midpoint_pair_exact(s1, s2, p)
                got = isinstance(tuple_feasible(P, [F, G], p), Decomposition)
                agree += truth == got
                sweep_conflicts += midpoint_pair_sweep(s1, s2, p, steps=64) and not truth
    return agree == pairs and not sweep_conflicts, f"{agree}/{pairs} edge pairs agree with the brute-force oracle"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


def _report(k: int, passed: bool, detail: str) -> str:
    return f"{'PASS' if passed else 'FAIL'} criterion {k}: {detail}"


@pytest.mark.slow
@pytest.mark.parametrize("k", range(1, 9))
def test_criterion(k, capsys):
    passed, detail = CRITERIA[k - 1]()
    with capsys.disabled():
        print("\n" + _report(k, passed, detail))
    assert passed, detail


if __name__ == "__main__":
    failed = 0
    for k, fn in enumerate(CRITERIA, 1):
        passed, detail = fn()
        failed += not passed
        print(_report(k, passed, detail), flush=True)
    sys.exit(1 if failed else 0)
