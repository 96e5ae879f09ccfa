"""Distance to a subspace ball, subspace gap and witness transport."""

from __future__ import annotations

import cvxpy as cp
import numpy as np
from scipy.optimize import minimize

from ..spaces import _cvx
from ..spaces.normed import LpSpace
from .config import GapResult, PackingResult, SolverConfig, min_pairwise

POLISH = 4


def _is_euclidean(space) -> bool:
    return isinstance(space, LpSpace) and space.p == 2 and np.all(space.w == 1)


def _build_distance(L):
    x = cp.Parameter(L.ambient.dim)
    c = cp.Variable(L.dim)
    y = L.basis.T @ c
    r1 = L.ambient.cvx(x - y)
    r2 = L.ambient.cvx(y)
    if r1 is None or r2 is None:
        return None
    prob = cp.Problem(cp.Minimize(r1[0]), r1[1] + r2[1] + [r2[0] <= 1])
    return prob, x, c


def distance_to_ball(L, x) -> tuple[float, np.ndarray]:
    """``min{||x - y|| : y in L, ||y|| <= 1}``; returns (value, nearest ambient point).

    Exact convex program (cvxpy/Clarabel) whenever the ambient norm has a
    conic representation; the Euclidean case uses orthogonal projection and
    a radial clip.  The nearest point is clipped into the ball and the value
    recomputed from it, so the pair is always consistent.
    """
    amb = L.ambient
    x = np.asarray(x, dtype=float)
    if x.shape != (amb.dim,):
        raise ValueError(f"dimension mismatch: expected a vector of length {amb.dim}")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite vector entries")
    if _is_euclidean(amb):
        c = L.basis @ x
        c = c / max(1.0, float(np.linalg.norm(c)))
    else:
        try:
            entry = L._cache.get("distance", lambda: _build_distance(L))
        except cp.error.DCPError:
            entry = None
        if entry is not None:
            prob, xp, cv = entry
            xp.value = x
            _cvx.solve(prob)
            c = np.asarray(cv.value, dtype=float)
        else:
            c = _distance_search(L, x)
    y = L.embed(c)
    ny = amb.norm(y)
    if ny > 1:
        y = y / ny
    return float(amb.norm(x - y)), y


def _distance_search(L, x):
    amb = L.ambient
    c0 = L.coords(x)
    c0 = c0 / max(1.0, L.norm(c0)) if np.any(c0) else c0
    res = minimize(lambda c: amb.norm(x - L.embed(c)), c0, method="SLSQP",
                   constraints=[{"type": "ineq", "fun": lambda c: 1.0 - L.norm(c)}],
                   options={"maxiter": 300, "ftol": 1e-12})
    return res.x


def perturbation_check(L, x, y, trials: int = 100, scale: float = 1e-3, seed: int = 0) -> bool:
    """Convexity certificate: no random feasible perturbation of ``y`` gets closer to ``x``."""
    amb = L.ambient
    rng = np.random.default_rng(seed)
    base = float(amb.norm(np.asarray(x) - y))
    c = L.coords(y)
    for _ in range(trials):
        c2 = c + scale * rng.standard_normal(L.dim)
        y2 = L.embed(c2)
        y2 = y2 / max(1.0, float(amb.norm(y2)))
        if amb.norm(x - y2) < base - 1e-9:
            return False
    return True


def same_ambient(M, L) -> bool:
    a, b = M.ambient, L.ambient
    return a is b or (a.spec is not None and a.spec == b.spec)


def _directed(M, L, config: SolverConfig, extra_starts=None):
    """Approximate ``sup_{x in B_M} dist(x, B_L)``; the sup sits on the sphere of M."""
    k = M.dim
    starts = [M.candidates()]
    rng = config.rng(7)
    starts.append(M.normalize(rng.standard_normal((max(8, config.restarts // 2), k))))
    if extra_starts is not None:
        starts.append(M.normalize(np.atleast_2d(extra_starts)))
    S = np.concatenate(starts)

    def f(c):
        if not np.any(c):
            return 0.0
        u = M.normalize(c)
        return distance_to_ball(L, M.embed(u))[0]

    vals = np.array([f(c) for c in S])
    order = np.argsort(-vals, kind="stable")[:POLISH]
    best_v, best_c = vals[order[0]], S[order[0]]
    if k > 1:
        for i in order:
            res = minimize(lambda c: -f(c), S[i], method="Nelder-Mead",
                           options={"maxiter": 150 * k, "xatol": 1e-9, "fatol": 1e-12})
            if np.any(res.x) and -res.fun > best_v:
                best_v, best_c = -res.fun, M.normalize(res.x)
    x = M.embed(M.normalize(best_c))
    v, y = distance_to_ball(L, x)
    return v, (x, y)


def subspace_gap(M, L, config: SolverConfig | None = None) -> GapResult:
    """Symmetrized gap between two subspaces of one ambient space.

    Inner distance problems are solved exactly; the outer maximization over
    the unit sphere of each subspace is a multi-start local search, so both
    directed values are LOWER bounds on the true gap.
    """
    config = config or SolverConfig()
    if not same_ambient(M, L):
        raise ValueError("subspace_gap requires both subspaces to share one ambient space")
    g_ml, w_ml = _directed(M, L, config)
    g_lm, w_lm = _directed(L, M, config)
    return GapResult(g_ML=g_ml, g_LM=g_lm, witness_ML=w_ml, witness_LM=w_lm,
                     diagnostics={"bound_side": "lower", "inner": "exact convex", "outer": "multi-start local"})


def transport_witness(result: PackingResult, M, L, g_bound: float, tol: float = 1e-6) -> PackingResult:
    """Move each witness of a packing in ``M`` to its nearest point of ``B_L``.

    The returned configuration lives in L (coefficient coordinates) and its
    separation is certified to be at least ``sep_M - 2 * max_i ||a_i - b_i||``
    by the triangle inequality.  ``diagnostics["flagged"]`` is set when a
    transport distance exceeds ``g_bound + tol`` (the gap estimate is then
    inconsistent, i.e. too small).
    """
    if not same_ambient(M, L):
        raise ValueError("transport requires both subspaces to share one ambient space")
    amb = M.ambient
    A = M.embed(result.points)
    moved, dists = [], []
    for a in A:
        v, b = distance_to_ball(L, a)
        moved.append(b)
        dists.append(v)
    B = np.array(moved)
    C = L.coords(B)
    C = C / np.maximum(1.0, np.asarray(L.norm(C)))[:, None]
    # re-measure the displacement of the coordinates actually returned
    disp = np.asarray(amb.norm(A - L.embed(C)))
    maxd = float(disp.max())
    mode = "symmetric" if result.mode == "symmetric" else "plain"
    sep = min_pairwise(L, C, mode)
    bound = result.separation - 2 * maxd
    diag = {"displacements": disp.tolist(), "max_displacement": maxd, "certified_bound": bound,
            "g_bound": g_bound, "flagged": bool(maxd > g_bound + tol), "source_separation": result.separation}
    return PackingResult(points=C, separation=sep, mode=mode, diagnostics=diag)
