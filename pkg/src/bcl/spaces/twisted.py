"""Twisted sums: the Kalton-Peck quasinorm and pullback renormings."""

from __future__ import annotations

import cvxpy as cp
import numpy as np
from scipy.optimize import minimize

from .normed import DirectSumSpace, NormedSpace, Subspace


def kalton_peck_omega(x) -> np.ndarray:
    """``x_i * log(|x_i| / ||x||_2)`` with ``0 log 0 = 0`` (natural log)."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite vector entries")
    r = np.linalg.norm(x)
    if r == 0:
        raise ValueError("Kalton-Peck map is undefined at the zero vector")
    return _omega_rows(x[None, :])[0]


def _omega_rows(X: np.ndarray) -> np.ndarray:
    r = np.linalg.norm(X, axis=1, keepdims=True)
    a = np.abs(X)
    safe = np.where(a > 0, a, 1.0)
    L = np.log(safe / np.where(r > 0, r, 1.0))
    return np.where(a > 0, X * L, 0.0)


class TwistedKPSpace(NormedSpace):
    """``||(y, x)|| = ||y - eps*Omega(x)||_2 + ||x||_2`` on R^n x R^n (a quasinorm)."""

    def __init__(self, n: int, eps: float, spec=None, samples: int = 4000, seed: int = 0):
        super().__init__(2 * n, spec)
        self.n = int(n)
        self.eps = float(eps)
        self.quasinorm_constant = self._measure_constant(samples, seed)
        self.meta["quasinorm_constant"] = self.quasinorm_constant

    def _norm(self, X):
        y, x = X[:, : self.n], X[:, self.n:]
        return np.linalg.norm(y - self.eps * _omega_rows(x), axis=1) + np.linalg.norm(x, axis=1)

    def _measure_constant(self, samples: int, seed: int) -> float:
        if self.eps == 0:
            return 1.0
        rng = np.random.default_rng(seed)
        U = rng.standard_normal((samples, self.dim))
        V = rng.standard_normal((samples, self.dim))
        # sparse and nearly-cancelling pairs stress the log term
        U[: samples // 2, self.n + 1:] *= rng.random((samples // 2, 1)) ** 4
        V[samples // 4: samples // 2] = -U[samples // 4: samples // 2] + 0.3 * V[samples // 4: samples // 2]
        num = self._norm(U + V)
        den = self._norm(U) + self._norm(V)
        ok = den > 0
        return float(max(1.0, np.max(num[ok] / den[ok])))

    def dual(self):
        raise ValueError("twisted_kp is a quasinormed space; it has no dual norm here")

    def support(self, f):
        raise ValueError("twisted_kp is a quasinormed space; support function undefined")


class TailSpace(NormedSpace):
    """Quotient of a 2n-dimensional base by its head coordinates: ``inf_a ||(a, b)||``."""

    def __init__(self, base: NormedSpace):
        super().__init__(base.dim // 2)
        self.base = base
        self.n = base.dim // 2
        self.is_coordinate = base.is_coordinate

    def _pad(self, B):
        return np.concatenate([np.zeros((len(B), self.n)), B], axis=1)

    def _norm(self, B):
        if self.base.is_coordinate:
            return self.base._norm(self._pad(B))
        return np.array([self._quotient(b) for b in B])

    def _quotient(self, b):
        if not np.any(b):
            return 0.0
        rep = None
        try:
            a = cp.Variable(self.n)
            rep = self.base.cvx(cp.hstack([a, b]))
        except cp.error.DCPError:
            rep = None
        if rep is not None:
            E, cons = rep
            prob = cp.Problem(cp.Minimize(E), cons)
            prob.solve(solver=cp.CLARABEL)
            return float(self.base.norm(np.concatenate([a.value, b])))
        res = minimize(lambda a: self.base.norm(np.concatenate([a, b])), np.zeros(self.n), method="Powell",
                       options={"xtol": 1e-10, "ftol": 1e-12})
        return float(min(res.fun, self.base.norm(np.concatenate([np.zeros(self.n), b]))))

    def _grad(self, B):
        if self.base.is_coordinate:
            return self.base._grad(self._pad(B))[:, self.n:]
        return super()._grad(B)

    def cvx(self, expr):
        if self.base.is_coordinate:
            return self.base.cvx(cp.hstack([np.zeros(self.n), expr]))
        a = cp.Variable(self.n)
        return self.base.cvx(cp.hstack([a, expr]))


class PullbackSpace(NormedSpace):
    """Pullback renorming: ``||(a, b)|| = max(||(a, b)||_X, ||b||_Z / eps)``.

    This is the norm that the subspace ``{((a, b), b/eps)}`` of ``X (+)_inf Z``
    inherits, where ``q(a, b) = b`` is the quotient map onto the tail space.
    """

    def __init__(self, base: NormedSpace, eps: float, spec=None):
        super().__init__(base.dim, spec)
        self.base = base
        self.eps = float(eps)
        self.n = base.dim // 2
        self.tail = TailSpace(base)

    def _norm(self, X):
        return np.maximum(self.base._norm(X), self.tail._norm(X[:, self.n:]) / self.eps)

    def _grad(self, X):
        nb = self.base._norm(X)
        nt = self.tail._norm(X[:, self.n:]) / self.eps
        gb = self.base._grad(X)
        gt = np.concatenate([np.zeros((len(X), self.n)), self.tail._grad(X[:, self.n:]) / self.eps], axis=1)
        return np.where((nb >= nt)[:, None], gb, gt)

    def cvx(self, expr):
        rb = self.base.cvx(expr)
        rt = self.tail.cvx(expr[self.n:])
        if rb is None or rt is None:
            return None
        return cp.maximum(rb[0], rt[0] / self.eps), rb[1] + rt[1]

    def embed(self, X) -> np.ndarray:
        """``(a, b) -> ((a, b), b/eps)`` into ``X (+)_inf Z``."""
        X = np.asarray(X, dtype=float)
        return np.concatenate([X, X[..., self.n:] / self.eps], axis=-1)


def pullback_pair(base: NormedSpace, eps: float):
    """Ambient ``X (+)_inf Z`` with the pullback copy and ``Y (+)_inf Z`` as subspaces.

    Returns ``(ambient, pb, yz)``.  With ``q(a, b) = b`` the kernel is
    ``Y = {(a, 0)}``; ``yz`` is spanned by ``((a, 0), 0)`` and ``(0, z)``.
    """
    n = base.dim // 2
    ambient = DirectSumSpace(np.inf, [base, TailSpace(base)])
    I = np.eye(n)
    Z = np.zeros((n, n))
    pb_basis = np.block([[I, Z, Z], [Z, I, I / eps]])
    yz_basis = np.block([[I, Z, Z], [Z, Z, I]])
    return ambient, Subspace(ambient, pb_basis), Subspace(ambient, yz_basis)
