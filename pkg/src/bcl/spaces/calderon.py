"""Calderón products ``X_1^{a_1} ... X_k^{a_k}`` of coordinate spaces.

The norm is the factorization infimum

    ||x|| = inf { prod_j ||y_j||_j^{a_j} : |x| <= prod_j |y_j|^{a_j} }.

When every factor is a (weighted) l_p space the product is again a weighted
l_p space with ``1/p = sum a_j/p_j`` and weights ``prod w_j^{a_j}``; that closed
form is used unless ``force_solver`` is set.  Otherwise the infimum is solved
in log-coordinates ``y_j = exp(u_j)`` on the support of ``x``: the constraint
``sum a_j u_j >= log|x|`` is linear and ``log ||exp(u)||`` is convex for any
lattice norm.
"""

from __future__ import annotations

import math

import cvxpy as cp
import numpy as np

from . import _cvx
from .normed import INF, LpSpace, NormedSpace

SOLVER_RTOL = 1e-8


def _as_lp(space: NormedSpace):
    if isinstance(space, LpSpace):
        return space
    if isinstance(space, CalderonSpace) and space.fast is not None:
        return space.fast
    return None


class CalderonSpace(NormedSpace):
    is_coordinate = True

    def __init__(self, factors, weights, spec=None, force_solver: bool = False):
        factors = list(factors)
        weights = [float(a) for a in weights]
        super().__init__(factors[0].dim, spec)
        self.factors = factors
        self.weights = weights
        self.active = [(f, a) for f, a in zip(factors, weights) if a > 0]
        self.is_symmetric = all(f.is_symmetric for f, _ in self.active)
        self.fast = None if force_solver else self._closed_form()
        self.meta["tolerance"] = 0.0 if self.fast is not None else SOLVER_RTOL

    def _closed_form(self):
        lps = [(_as_lp(f), a) for f, a in self.active]
        if any(s is None for s, _ in lps):
            return None
        inv_p = sum(a / s.p for s, a in lps if s.p != INF)
        p = INF if inv_p == 0 else 1.0 / inv_p
        logw = sum(a * np.log(s.w) for s, a in lps)
        return LpSpace(self.dim, p, np.exp(logw))

    # -- generic solver -------------------------------------------------------

    def _log_norm_cvx(self, u, idx):
        if self.fast is not None:
            return self.fast._log_norm_cvx(u, idx)
        us = [cp.Variable(len(idx)) for _ in self.active]
        terms, cons = [], []
        for v, (f, a) in zip(us, self.active):
            e, c = f._log_norm_cvx(v, idx)
            terms.append(a * e)
            cons += c
        lhs = sum(a * v for v, (_, a) in zip(us, self.active))
        cons.append(lhs >= u)
        return sum(terms), cons

    def _build(self, support: tuple):
        idx = np.array(support)
        logx = cp.Parameter(len(idx))
        us = [cp.Variable(len(idx)) for _ in self.active]
        terms, cons = [], []
        for v, (f, a) in zip(us, self.active):
            e, c = f._log_norm_cvx(v, idx)
            terms.append(a * e)
            cons += c
        link = sum(a * v for v, (_, a) in zip(us, self.active)) >= logx
        prob = cp.Problem(cp.Minimize(sum(terms)), cons + [link])
        return prob, logx, link

    def _solve_one(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        support = tuple(int(i) for i in np.nonzero(x)[0])
        g = np.zeros(self.dim)
        if not support:
            return 0.0, g
        prob, logx, link = self._cache.get(support, lambda: self._build(support))
        lx = np.log(np.abs(x[list(support)]))
        # shift by the max so the conic solver sees O(1) data; homogeneity restores it
        shift = lx.max()
        logx.value = lx - shift
        val = _cvx.solve(prob) + shift
        nrm = math.exp(val)
        lam = np.asarray(link.dual_value, dtype=float).reshape(-1)
        idx = list(support)
        g[idx] = nrm * lam / x[idx]
        return nrm, g

    def _norm(self, X):
        if self.fast is not None:
            return self.fast._norm(X)
        return np.array([self._solve_one(x)[0] for x in X])

    def _grad(self, X):
        if self.fast is not None:
            return self.fast._grad(X)
        return np.array([self._solve_one(x)[1] for x in X])

    def support(self, f):
        if self.fast is not None:
            return self.fast.support(f)
        f = self._rows(f)[0][0]
        d = self.dual()
        val, x = d.norm(f), d.grad(f)
        nx = self.norm(x)
        if nx > 0:
            x = x / nx
        return float(f @ x), x

    def dual(self):
        # Lozanovskii duality for finite-dimensional lattices
        if self.fast is not None:
            return self.fast.dual()
        return CalderonSpace([f.dual() for f in self.factors], self.weights,
                             force_solver=True)

    def cvx(self, expr):
        if self.fast is not None:
            return self.fast.cvx(expr)
        s = cp.Variable(nonneg=True)
        ys, cons = [], []
        for f, _ in self.active:
            y = cp.Variable(self.dim, nonneg=True)
            rep = f.cvx(y)
            if rep is None:
                return None
            cons += rep[1] + [rep[0] <= s]
            ys.append(y)
        a = [w for _, w in self.active]
        for i in range(self.dim):
            gm = cp.geo_mean(cp.hstack([y[i] for y in ys]), a) if len(ys) > 1 else ys[0][i]
            cons.append(cp.abs(expr[i]) <= gm)
        return s, cons
