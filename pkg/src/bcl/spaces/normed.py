"""Norm evaluation engines.

Every concrete space evaluates its norm on arrays of shape ``(..., dim)``.
Besides the norm itself a space knows a (sub)gradient, its support function
``max{<f, x> : ||x|| <= 1}`` together with a maximizer, its dual space and,
when possible, a cvxpy representation used by the convex inner solvers.
"""

from __future__ import annotations

import itertools
import math

import cvxpy as cp
import numpy as np
from scipy.optimize import linprog, minimize

from . import _cvx

INF = math.inf


def conjugate(p: float) -> float:
    if p == 1:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


class NormedSpace:
    """Base class; subclasses implement ``_norm`` on 2-d row arrays."""

    quasinorm_constant = 1.0
    is_coordinate = False
    is_symmetric = False

    def __init__(self, dim: int, spec=None):
        self.dim = int(dim)
        self.spec = spec
        self.meta: dict = {}
        self._cache = _cvx.ProblemCache()

    # -- public, shape-polymorphic API -------------------------------------------

    def _rows(self, x) -> tuple[np.ndarray, tuple]:
        X = np.asarray(x, dtype=float)
        if X.ndim == 0 or X.shape[-1] != self.dim:
            raise ValueError(f"dimension mismatch: expected vectors of length {self.dim}, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise ValueError("non-finite vector entries")
        return X.reshape(-1, self.dim), X.shape[:-1]

    def norm(self, x):
        rows, lead = self._rows(x)
        out = self._norm(rows).reshape(lead)
        return float(out) if out.ndim == 0 else out

    def grad(self, x) -> np.ndarray:
        rows, lead = self._rows(x)
        return self._grad(rows).reshape(lead + (self.dim,))

    def project_ball(self, x) -> np.ndarray:
        X = np.asarray(x, dtype=float)
        n = np.asarray(self.norm(X))
        return X / np.maximum(1.0, n)[..., None]

    def normalize(self, x) -> np.ndarray:
        X = np.asarray(x, dtype=float)
        n = np.asarray(self.norm(X))
        if np.any(n == 0):
            raise ValueError("cannot normalize the zero vector")
        return X / n[..., None]

    @property
    def is_norm(self) -> bool:
        return self.quasinorm_constant == 1.0

    # -- overridable pieces --------------------------------------------------

    def _norm(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _grad(self, X: np.ndarray) -> np.ndarray:
        # central differences, step 1e-6*(1+|x|)
        m, d = X.shape
        h = 1e-6 * (1.0 + np.max(np.abs(X), axis=1))
        E = np.eye(d)
        pts = np.concatenate([X[:, None, :] + h[:, None, None] * E, X[:, None, :] - h[:, None, None] * E], axis=1)
        vals = self._norm(pts.reshape(-1, d)).reshape(m, 2 * d)
        return (vals[:, :d] - vals[:, d:]) / (2 * h[:, None])

    def cvx(self, expr):
        """Return ``(E, constraints)`` with ``||expr|| = min E`` subject to the constraints.

        Auxiliary variables may appear, so ``E`` must only be pushed downwards
        (minimized, or bounded above).  ``None`` when no representation exists.
        """
        return None

    def support(self, f) -> tuple[float, np.ndarray]:
        """Maximize ``<f, x>`` over the unit ball; returns (value, maximizer)."""
        f = self._rows(f)[0][0]
        if not np.any(f):
            return 0.0, self.normalize(np.eye(self.dim)[0])
        exact = self._support_cvx(f)
        if exact is not None:
            return exact
        return self._support_search(f)

    @property
    def support_is_exact(self) -> bool:
        try:
            return self.cvx(cp.Variable(self.dim)) is not None
        except cp.error.DCPError:
            return False

    def dual_norm(self, f):
        return self.dual().norm(f)

    def dual(self) -> "NormedSpace":
        if not self.is_norm:
            raise ValueError("dual space requested for a quasinormed space")
        return DualSpace(self)

    def candidates(self) -> np.ndarray:
        """Structured unit-sphere points: normalized +-e_i and sign vectors."""
        d = self.dim
        pts = [np.eye(d), -np.eye(d)]
        if d <= 8:
            signs = np.array(list(itertools.product([1.0, -1.0], repeat=d)))
            pts.append(signs)
        P = np.concatenate(pts)
        return self.normalize(P)

    # -- support helpers --------------------------------------------------------

    def _support_cvx(self, f: np.ndarray):
        def build():
            x = cp.Variable(self.dim)
            fp = cp.Parameter(self.dim)
            rep = self.cvx(x)
            if rep is None:
                return None
            E, cons = rep
            prob = cp.Problem(cp.Maximize(fp @ x), cons + [E <= 1])
            if not prob.is_dcp(dpp=True):
                return None
            return prob, fp, x

        try:
            entry = self._cache.get("support", build)
        except cp.error.DCPError:
            entry = None
        if entry is None:
            return None
        prob, fp, x = entry
        fp.value = f
        _cvx.solve(prob)
        xv = np.asarray(x.value, dtype=float)
        nx = self.norm(xv)
        if nx > 0:
            xv = xv / nx
        return float(f @ xv), xv

    def _support_search(self, f: np.ndarray):
        self.meta["heuristic_support"] = True
        rng = np.random.default_rng(0)
        starts = [f, np.sign(f) + (f == 0) * 0.0, rng.standard_normal((6, self.dim))]
        starts = np.vstack([np.atleast_2d(s) for s in starts])
        best_val, best_x = -np.inf, None
        for s in starts:
            if not np.any(s):
                continue
            s = s / self.norm(s)
            res = minimize(lambda x: -f @ x, s, jac=lambda x: -f, method="SLSQP",
                           constraints=[{"type": "ineq", "fun": lambda x: 1.0 - self.norm(x),
                                         "jac": lambda x: -self.grad(x)}],
                           options={"maxiter": 200, "ftol": 1e-12})
            x = res.x if np.all(np.isfinite(res.x)) and np.any(res.x) else s
            x = x / self.norm(x)
            val = float(f @ x)
            if val > best_val:
                best_val, best_x = val, x
        return best_val, best_x


class LpSpace(NormedSpace):
    """Weighted l_p norm ``||w*x||_p``; unweighted when ``weights`` is None."""

    is_coordinate = True

    def __init__(self, n: int, p: float, weights=None, spec=None):
        super().__init__(n, spec)
        self.p = float(p)
        self.w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
        self.is_symmetric = bool(np.all(self.w == self.w[0]))

    def _norm(self, X):
        Y = np.abs(X) * self.w
        p = self.p
        if p == 1:
            return Y.sum(axis=1)
        if p == INF:
            return Y.max(axis=1)
        if p == 2:
            return np.sqrt((Y * Y).sum(axis=1))
        m = Y.max(axis=1)
        safe = np.where(m > 0, m, 1.0)
        return m * ((Y / safe[:, None]) ** p).sum(axis=1) ** (1.0 / p)

    def _grad(self, X):
        s = np.sign(X) * self.w
        p = self.p
        if p == 1:
            return s
        Y = np.abs(X) * self.w
        if p == INF:
            k = np.argmax(Y, axis=1)
            G = np.zeros_like(X)
            rows = np.arange(len(X))
            G[rows, k] = s[rows, k]
            return G
        n = self._norm(X)
        safe = np.where(n > 0, n, 1.0)
        return s * (Y / safe[:, None]) ** (p - 1)

    def support(self, f):
        f = self._rows(f)[0][0]
        if not np.any(f):
            return 0.0, np.eye(self.dim)[0] / self.w[0]
        d = self.dual()
        x = d.grad(f)
        x = x / self.norm(x)
        return float(f @ x), x

    def dual(self):
        return LpSpace(self.dim, conjugate(self.p), 1.0 / self.w)

    def cvx(self, expr):
        arg = expr if self.is_symmetric and self.w[0] == 1 else cp.multiply(self.w, expr)
        if self.p == INF:
            return cp.norm(arg, "inf"), []
        if self.p == 1:
            return cp.norm1(arg), []
        return cp.pnorm(arg, self.p), []

    def _log_norm_cvx(self, u, idx):
        lw = np.log(self.w[idx])
        if self.p == INF:
            return cp.max(u + lw), []
        return cp.log_sum_exp(self.p * (u + lw)) / self.p, []


class PolyhedralSpace(NormedSpace):
    """``||x|| = max_i |<f_i, x>|`` for a spanning family of functionals."""

    def __init__(self, functionals, spec=None):
        F = np.atleast_2d(np.asarray(functionals, dtype=float))
        super().__init__(F.shape[1], spec)
        self.F = F

    def _norm(self, X):
        return np.abs(X @ self.F.T).max(axis=1)

    def _grad(self, X):
        V = X @ self.F.T
        k = np.argmax(np.abs(V), axis=1)
        return np.sign(V[np.arange(len(X)), k])[:, None] * self.F[k]

    def support(self, f):
        f = self._rows(f)[0][0]
        if not np.any(f):
            return 0.0, self.normalize(np.eye(self.dim)[0])
        k = len(self.F)
        res = linprog(-f, A_ub=np.vstack([self.F, -self.F]), b_ub=np.ones(2 * k),
                      bounds=[(None, None)] * self.dim, method="highs")
        if res.status != 0:
            raise RuntimeError(f"support LP failed: {res.message}")
        x = res.x / self.norm(res.x)
        return float(f @ x), x

    def dual(self):
        return GaugeSpace(self.F)

    def cvx(self, expr):
        return cp.norm(self.F @ expr, "inf"), []

    def candidates(self):
        extra = [self.support(g)[1] for g in np.vstack([self.F, -self.F])]
        return np.concatenate([super().candidates(), np.array(extra)])


class GaugeSpace(NormedSpace):
    """Gauge of the polytope ``conv(+-v_i)``; the dual of a polyhedral norm."""

    def __init__(self, vertices, spec=None):
        V = np.atleast_2d(np.asarray(vertices, dtype=float))
        super().__init__(V.shape[1], spec)
        self.V = V
        self._polar = PolyhedralSpace(V)

    def _norm(self, X):
        return np.array([self._polar.support(x)[0] for x in X])

    def _grad(self, X):
        return np.array([self._polar.support(x)[1] if np.any(x) else np.zeros(self.dim) for x in X])

    def support(self, f):
        f = self._rows(f)[0][0]
        vals = self.V @ f
        k = int(np.argmax(np.abs(vals)))
        x = np.sign(vals[k]) * self.V[k] if vals[k] != 0 else self.V[k]
        x = x / self.norm(x)
        return float(f @ x), x

    def dual(self):
        return PolyhedralSpace(self.V)

    def cvx(self, expr):
        lam = cp.Variable(len(self.V))
        return cp.norm1(lam), [self.V.T @ lam == expr]


class DirectSumSpace(NormedSpace):
    """``(X_1 + ... + X_k)`` with the outer l_p norm of the block norms."""

    def __init__(self, outer: float, parts, spec=None):
        parts = list(parts)
        super().__init__(sum(p.dim for p in parts), spec)
        self.outer = float(outer)
        self.parts = parts
        edges = np.cumsum([0] + [p.dim for p in parts])
        self.slices = [slice(a, b) for a, b in zip(edges[:-1], edges[1:])]
        self._outer = LpSpace(len(parts), outer)
        self.is_coordinate = all(p.is_coordinate for p in parts)
        self.quasinorm_constant = max(p.quasinorm_constant for p in parts)
        self.is_symmetric = (self.is_coordinate and all(p.is_symmetric for p in parts)
                             and len({p.spec for p in parts}) == 1 and parts[0].spec is not None)

    def _block_norms(self, X):
        return np.stack([p._norm(X[:, sl]) for p, sl in zip(self.parts, self.slices)], axis=1)

    def _norm(self, X):
        return self._outer._norm(self._block_norms(X))

    def _grad(self, X):
        go = self._outer._grad(self._block_norms(X))
        return np.concatenate([go[:, [j]] * p._grad(X[:, sl])
                               for j, (p, sl) in enumerate(zip(self.parts, self.slices))], axis=1)

    def support(self, f):
        f = self._rows(f)[0][0]
        pieces = [p.support(f[sl]) for p, sl in zip(self.parts, self.slices)]
        vals = np.array([v for v, _ in pieces])
        if not np.any(vals):
            return 0.0, self.normalize(np.eye(self.dim)[0])
        _, t = self._outer.support(vals)
        x = np.concatenate([tj * xj for tj, (_, xj) in zip(t, pieces)])
        x = x / self.norm(x)
        return float(f @ x), x

    def dual(self):
        return DirectSumSpace(conjugate(self.outer), [p.dual() for p in self.parts])

    def cvx(self, expr):
        terms, cons = [], []
        for p, sl in zip(self.parts, self.slices):
            rep = p.cvx(expr[sl])
            if rep is None:
                return None
            terms.append(rep[0])
            cons += rep[1]
        h = cp.hstack(terms)
        if self.outer == INF:
            return cp.max(h), cons
        if self.outer == 1:
            return cp.sum(h), cons
        return cp.pnorm(h, self.outer), cons

    def _log_norm_cvx(self, u, idx):
        terms, cons = [], []
        idx = np.asarray(idx)
        for p, sl in zip(self.parts, self.slices):
            pos = np.nonzero((idx >= sl.start) & (idx < sl.stop))[0]
            if len(pos) == 0:
                continue
            e, c = p._log_norm_cvx(u[pos], idx[pos] - sl.start)
            terms.append(e)
            cons += c
        h = cp.hstack(terms) if len(terms) > 1 else terms[0]
        if self.outer == INF:
            return cp.max(h), cons
        return cp.log_sum_exp(self.outer * h) / self.outer, cons


class VectorSumSpace(NormedSpace):
    """``lambda(X)``: m blocks of length k, normed by ``||(||x_1||_X, ..., ||x_m||_X)||_lambda``."""

    def __init__(self, lam: NormedSpace, inner: NormedSpace, spec=None):
        super().__init__(lam.dim * inner.dim, spec)
        self.lam = lam
        self.inner = inner
        self.m, self.k = lam.dim, inner.dim
        self.is_coordinate = lam.is_coordinate and inner.is_coordinate
        self.is_symmetric = self.is_coordinate and lam.is_symmetric and inner.is_symmetric

    def _block_norms(self, X):
        return self.inner._norm(X.reshape(-1, self.k)).reshape(len(X), self.m)

    def _norm(self, X):
        return self.lam._norm(self._block_norms(X))

    def _grad(self, X):
        gl = self.lam._grad(self._block_norms(X))
        gi = self.inner._grad(X.reshape(-1, self.k)).reshape(len(X), self.m, self.k)
        return (gl[:, :, None] * gi).reshape(len(X), self.dim)

    def support(self, f):
        f = self._rows(f)[0][0]
        blocks = f.reshape(self.m, self.k)
        pieces = [self.inner.support(b) for b in blocks]
        vals = np.array([v for v, _ in pieces])
        if not np.any(vals):
            return 0.0, self.normalize(np.eye(self.dim)[0])
        _, t = self.lam.support(vals)
        x = np.concatenate([ti * xi for ti, (_, xi) in zip(t, pieces)])
        x = x / self.norm(x)
        return float(f @ x), x

    def dual(self):
        return VectorSumSpace(self.lam.dual(), self.inner.dual())

    def cvx(self, expr):
        terms, cons = [], []
        for i in range(self.m):
            rep = self.inner.cvx(expr[i * self.k:(i + 1) * self.k])
            if rep is None:
                return None
            terms.append(rep[0])
            cons += rep[1]
        if not isinstance(self.lam, (LpSpace, DirectSumSpace)):
            return None
        rep = self.lam.cvx(cp.hstack(terms))
        if rep is None:
            return None
        return rep[0], cons + rep[1]

    def _log_norm_cvx(self, u, idx):
        idx = np.asarray(idx)
        rows = idx // self.k
        terms, cons, active = [], [], []
        for i in np.unique(rows):
            pos = np.nonzero(rows == i)[0]
            e, c = self.inner._log_norm_cvx(u[pos], idx[pos] - i * self.k)
            terms.append(e)
            cons += c
            active.append(i)
        h = cp.hstack(terms) if len(terms) > 1 else cp.reshape(terms[0], (1,))
        e, c = self.lam._log_norm_cvx(h, np.array(active))
        return e, cons + c


class Subspace(NormedSpace):
    """A linear subspace of ``ambient`` in orthonormal coefficient coordinates.

    ``basis`` rows are orthonormalized (QR); vectors of this space are
    coefficient vectors ``c`` representing the ambient point ``c @ basis``.
    """

    def __init__(self, ambient: NormedSpace, basis, spec=None):
        B = np.atleast_2d(np.asarray(basis, dtype=float))
        if B.shape[1] != ambient.dim:
            raise ValueError(f"basis vectors must have length {ambient.dim}")
        if np.linalg.matrix_rank(B) < B.shape[0]:
            raise ValueError("basis vectors are linearly dependent")
        Q, R = np.linalg.qr(B.T)
        Q = Q * np.sign(np.where(np.diag(R) == 0, 1.0, np.diag(R)))
        super().__init__(B.shape[0], spec)
        self.ambient = ambient
        self.basis = Q.T
        self.quasinorm_constant = ambient.quasinorm_constant

    def embed(self, c) -> np.ndarray:
        return np.asarray(c, dtype=float) @ self.basis

    def coords(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float) @ self.basis.T

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        r = x - self.embed(self.coords(x))
        return bool(np.linalg.norm(r) <= tol * max(1.0, np.linalg.norm(x)))

    def _norm(self, C):
        return self.ambient._norm(C @ self.basis)

    def _grad(self, C):
        return self.ambient._grad(C @ self.basis) @ self.basis.T

    def cvx(self, expr):
        return self.ambient.cvx(self.basis.T @ expr)

    def candidates(self):
        k = self.dim
        E = np.eye(k)
        pts = [E, -E]
        for i, j in itertools.combinations(range(k), 2):
            for s in (1.0, -1.0):
                pts.append(((E[i] + s * E[j]))[None, :])
                pts.append((-(E[i] + s * E[j]))[None, :])
        return self.normalize(np.concatenate(pts))


class DualSpace(NormedSpace):
    """Dual of an arbitrary normed space via its support function."""

    def __init__(self, primal: NormedSpace):
        super().__init__(primal.dim)
        self.primal = primal
        self.meta["heuristic"] = not primal.support_is_exact

    def _norm(self, F):
        return np.array([self.primal.support(f)[0] for f in F])

    def _grad(self, F):
        return np.array([self.primal.support(f)[1] if np.any(f) else np.zeros(self.dim) for f in F])

    def support(self, x):
        x = self._rows(x)[0][0]
        g = self.primal.grad(x)
        val = self.norm(g)
        g = g / val if val > 0 else g
        return float(x @ g), g

    def dual(self):
        return self.primal
