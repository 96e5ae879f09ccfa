"""Thin cvxpy layer: tight solver settings and per-thread problem caches."""

from __future__ import annotations

import threading
import warnings
from typing import Callable

import cvxpy as cp

_SETTINGS = {
    "tol_gap_abs": 1e-11,
    "tol_gap_rel": 1e-11,
    "tol_feas": 1e-11,
    "tol_ktratio": 1e-9,
    "max_iter": 400,
}

_OK = (cp.OPTIMAL, cp.OPTIMAL_INACCURATE)


class ConvexSolveError(RuntimeError):
    pass


def solve(problem: cp.Problem) -> float:
    # OPTIMAL_INACCURATE at these tolerances is still far below what callers
    # need, and every reported value is recomputed from the returned point
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="Solution may be inaccurate")
        try:
            problem.solve(solver=cp.CLARABEL, **_SETTINGS)
        except cp.error.SolverError:
            problem.solve(solver=cp.SCS, eps=1e-10, max_iters=50000)
    if problem.status not in _OK:
        raise ConvexSolveError(f"convex subproblem ended with status {problem.status}")
    return float(problem.value)


class ProblemCache:
    """Compiled parametrized problems, one dictionary per thread.

    cvxpy problems carry mutable parameter values, so they are never shared
    between threads.
    """

    def __init__(self):
        self._local = threading.local()

    def get(self, key, build: Callable[[], tuple]):
        store = getattr(self._local, "store", None)
        if store is None:
            store = self._local.store = {}
        if key not in store:
            store[key] = build()
        return store[key]
