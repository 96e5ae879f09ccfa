"""Auerbach systems by determinant maximization.

With the basis as the rows of ``X``, ``det X`` is linear in each row:
``det X = <cof_i, x_i>``.  Coordinate ascent replaces ``x_i`` by the
maximizer of ``<sign(det) cof_i, x>`` over the unit ball (a support-function
call).  At a coordinate-wise maximum the biorthogonal functionals, the
columns of ``X^{-1}``, have dual norm exactly one.
"""

from __future__ import annotations

import numpy as np

from ..spaces.normed import LpSpace
from .config import AuerbachSystem, NonConvergenceError, SolverConfig

MAX_SWEEPS = 200
STARTS = 8
CERT_TOL = 1e-9


def _residual(X, F) -> float:
    return float(np.max(np.abs(F @ X.T - np.eye(len(X)))))


def _dual_excess(space, F) -> float:
    return max(abs(space.support(f)[0] - 1.0) for f in F)


def _ascend(space, X):
    n = len(X)
    detv = np.linalg.det(X)
    history = [abs(detv)]
    for sweep in range(MAX_SWEEPS):
        for i in range(n):
            F = np.linalg.inv(X).T
            cof = detv * F[i]
            _, x = space.support(np.sign(detv) * cof if detv != 0 else cof)
            X[i] = x
            detv = np.linalg.det(X)
        history.append(abs(detv))
        F = np.linalg.inv(X).T
        if _dual_excess(space, F) <= CERT_TOL:
            return X, F, sweep + 1, history
    F = np.linalg.inv(X).T
    return X, F, MAX_SWEEPS, history


def auerbach(space, config: SolverConfig | None = None) -> AuerbachSystem:
    """Unit basis ``x_i`` and functionals ``x*_i`` with ``<x*_i, x_j> = delta_ij``, all of norm one.

    Weighted and plain l_p spaces get the (scaled) coordinate system directly.
    Otherwise the best of several determinant-ascent starts is returned; a
    start that misses the dual-norm certificate raises ``NonConvergenceError``.
    """
    config = config or SolverConfig()
    if not space.is_norm:
        raise ValueError("Auerbach systems need a genuine norm")
    n = space.dim
    if isinstance(space, LpSpace):
        X = np.diag(1.0 / space.w)
        F = np.diag(space.w)
        return AuerbachSystem(basis=X, duals=F, residual=_residual(X, F), diagnostics={"method": "coordinate"})

    starts = [space.normalize(np.eye(n))]
    for k in range(1, STARTS):
        starts.append(space.normalize(config.rng(k).standard_normal((n, n))))
    best = None
    tried = []
    for X0 in starts:
        if abs(np.linalg.det(X0)) < 1e-12:
            continue
        X, F, sweeps, hist = _ascend(space, X0.copy())
        exc = _dual_excess(space, F)
        tried.append({"det": float(abs(np.linalg.det(X))), "sweeps": sweeps, "dual_excess": exc})
        if exc <= CERT_TOL and (best is None or abs(np.linalg.det(X)) > abs(np.linalg.det(best[0])) + 1e-14):
            best = (X, F)
    if best is None:
        raise NonConvergenceError("determinant ascent did not reach the biorthogonality certificate",
                                  {"starts": tried})
    X, F = best
    res = _residual(X, F)
    if res > 1e-9:
        raise NonConvergenceError(f"biorthogonality residual {res:.3g} exceeds 1e-9", {"starts": tried})
    return AuerbachSystem(basis=X, duals=F, residual=res,
                          diagnostics={"method": "determinant ascent", "starts": tried})
