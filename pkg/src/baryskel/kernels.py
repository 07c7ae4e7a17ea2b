"""Float screening of face tuples.

The solver tests face tuples with exact LPs, which is the expensive part.
Before that, every candidate tuple is screened in float64 with a necessary
condition (support functions of the weighted Minkowski sum must dominate
the target along a fixed direction set) and scored by how far the weighted
sum of face centroids lands from the target.  Nothing computed here reaches
an output: the scores only order the exact checks, and a failed screen
only demotes a tuple to the back of the queue.

Set ``BARYSKEL_KERNEL=numpy`` to force the vectorised numpy path; the
default uses numba when it imports.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


def _backend() -> str:
    want = os.environ.get("BARYSKEL_KERNEL", "numba").lower()
    if want not in ("numba", "numpy"):
        raise ValueError(f"BARYSKEL_KERNEL must be 'numba' or 'numpy', got {want!r}")
    return "numba" if want == "numba" and HAVE_NUMBA else "numpy"


def screen_tuples_numpy(H, C, rhs, target, weights, combos, tol):
    """Vectorised reference path.  Returns ``(ok, score)`` per tuple."""
    S = np.zeros((combos.shape[0], H.shape[1]))
    X = np.zeros((combos.shape[0], C.shape[1]))
    for i in range(combos.shape[1]):
        S += weights[i] * H[combos[:, i]]
        X += weights[i] * C[combos[:, i]]
    ok = np.all(S >= rhs - tol, axis=1)
    score = np.sum((X - target) ** 2, axis=1)
    return ok, score


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def screen_tuples_numba(H, C, rhs, target, weights, combos, tol):
        T, n = combos.shape
        m = H.shape[1]
        D = C.shape[1]
        ok = np.ones(T, dtype=np.bool_)
        score = np.empty(T)
        for t in range(T):
            for u in range(m):
                s = 0.0
                for i in range(n):
                    s += weights[i] * H[combos[t, i], u]
                if s < rhs[u] - tol:
                    ok[t] = False
                    break
            acc = 0.0
            for c in range(D):
                x = 0.0
                for i in range(n):
                    x += weights[i] * C[combos[t, i], c]
                acc += (x - target[c]) ** 2
            score[t] = acc
        return ok, score

else:  # pragma: no cover
    screen_tuples_numba = None


def screen_tuples(H, C, rhs, target, weights, combos, tol=1e-9, backend=None):
    backend = backend or _backend()
    args = (
        np.ascontiguousarray(H, dtype=np.float64),
        np.ascontiguousarray(C, dtype=np.float64),
        np.ascontiguousarray(rhs, dtype=np.float64),
        np.ascontiguousarray(target, dtype=np.float64),
        np.ascontiguousarray(weights, dtype=np.float64),
        np.ascontiguousarray(combos, dtype=np.int64),
        float(tol),
    )
    if combos.shape[0] == 0:
        return np.zeros(0, dtype=bool), np.zeros(0)
    if backend == "numba":
        return screen_tuples_numba(*args)
    return screen_tuples_numpy(*args)
