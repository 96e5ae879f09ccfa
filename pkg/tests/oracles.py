"""Independent reference computations.

Nothing here imports the package solvers: each oracle is a direct grid,
enumeration or closed-form construction.  Tests freeze the oracle outputs
as literals; ``test_oracles.py`` re-derives them so the literals stay honest.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.linalg import subspace_angles
from scipy.optimize import minimize


def lp_norm(X, p):
    X = np.abs(np.asarray(X, dtype=float))
    if p == math.inf:
        return X.max(axis=-1)
    return (X ** p).sum(axis=-1) ** (1.0 / p)


def lp_circle(p, m):
    """``m`` points of the unit sphere of l_p^2 at uniform angles."""
    t = np.linspace(0.0, 2 * np.pi, m, endpoint=False)
    U = np.stack([np.cos(t), np.sin(t)], axis=1)
    return U / lp_norm(U, p)[:, None]


def james_grid(p, m=3000, chunk=500):
    """``(max min(|x-y|, |x+y|), min max(|x-y|, |x+y|))`` over a sphere grid of l_p^2."""
    U = lp_circle(p, m)
    best_j, best_g = 0.0, np.inf
    for s in range(0, m, chunk):
        A = U[s:s + chunk, None, :]
        dm = lp_norm(A - U[None], p)
        dp = lp_norm(A + U[None], p)
        best_j = max(best_j, float(np.minimum(dm, dp).max()))
        best_g = min(best_g, float(np.maximum(dm, dp).min()))
    return best_j, best_g


def simplex_separation(n):
    """Min distance of the regular simplex with n + 1 unit vertices in R^n."""
    E = np.eye(n + 1) - 1.0 / (n + 1)
    # orthonormal coordinates of the centered simplex inside the sum-zero hyperplane
    Q, _ = np.linalg.qr(E[:, :n])
    V = E @ Q
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    return min(float(np.linalg.norm(V[i] - V[j])) for i, j in itertools.combinations(range(n + 1), 2))


def circle_covering(N, m=200000):
    """Covering radius of the unit circle by the regular N-gon on it, by dense sampling."""
    t = np.linspace(0, 2 * np.pi, m, endpoint=False)
    P = np.stack([np.cos(t), np.sin(t)], 1)
    a = 2 * np.pi * np.arange(N) / N
    Cn = np.stack([np.cos(a), np.sin(a)], 1)
    D = np.linalg.norm(P[:, None, :] - Cn[None], axis=2)
    return float(D.min(axis=1).max())


def plane_gap(B1, B2):
    """Euclidean gap of two subspaces: sine of the largest principal angle."""
    return float(np.sin(subspace_angles(np.asarray(B1).T, np.asarray(B2).T).max()))


def calderon_factorization(x, p0, w0, p1, w1, theta):
    """``inf ||y||_0^(1-theta) ||z||_1^theta`` over factorizations ``|x| = |y|^(1-theta) |z|^theta``.

    Factors are weighted l_p norms.  The factorization is parametrized by
    ``|y| = |x| e^(theta s)``, ``|z| = |x| e^(-(1-theta) s)`` and minimized
    over ``s`` with BFGS from several starts.
    """
    x = np.abs(np.asarray(x, dtype=float))
    supp = x > 0
    xs = x[supp]
    w0, w1 = np.asarray(w0, float)[supp], np.asarray(w1, float)[supp]

    def obj(s):
        y = xs * np.exp(theta * s)
        z = xs * np.exp(-(1 - theta) * s)
        return (1 - theta) * math.log(lp_norm(w0 * y, p0)) + theta * math.log(lp_norm(w1 * z, p1))

    rng = np.random.default_rng(0)
    best = np.inf
    for k in range(6):
        s0 = np.zeros(len(xs)) if k == 0 else rng.normal(scale=1.0, size=len(xs))
        r = minimize(obj, s0, method="BFGS", options={"gtol": 1e-12, "maxiter": 5000})
        r = minimize(obj, r.x, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 20000})
        best = min(best, float(r.fun))
    return math.exp(best)


def largest_compatible_exhaustive(D, idx, a, b):
    """Size of the largest subset of ``idx`` with all pairwise distances in ``[a, b]``."""
    for k in range(len(idx), 0, -1):
        for sub in itertools.combinations(idx, k):
            if all(a <= D[i, j] <= b for i, j in itertools.combinations(sub, 2)):
                return k
    return 0


def brute_maximin(P, N, dist):
    """Exact best N-subset of a small finite set by enumeration."""
    best = -1.0
    for sub in itertools.combinations(range(len(P)), N):
        v = min(dist(P[i], P[j]) for i, j in itertools.combinations(sub, 2))
        best = max(best, v)
    return best
