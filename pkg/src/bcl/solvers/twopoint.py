"""Two-point saddle searches on the product of unit spheres.

``james``: maximize ``min(||x - y||, ||x + y||)`` (a lower bound for Jm).
``g``: minimize ``max(||x - y||, ||x + y||)`` (an upper bound for the lower
James constant).  A vectorized random and structured screening picks the
starts; each is polished by a joint Nelder-Mead pass followed by
alternating passes over one point with the other held fixed.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import minimize

from .config import SolverConfig

MODES = ("james", "g")
SCREEN = 4096
POLISH = 6


def pair_value(space, x, y, mode: str) -> float:
    a, b = space.norm(np.stack([x - y, x + y]))
    return float(min(a, b) if mode == "james" else max(a, b))


def _batch_values(space, X, Y, mode):
    a = space.norm(X - Y)
    b = space.norm(X + Y)
    return np.minimum(a, b) if mode == "james" else np.maximum(a, b)


def two_point_constant(space, mode: str = "james", config: SolverConfig | None = None, init=None):
    """Return ``(value, (x, y))`` with ``x, y`` on the unit sphere.

    ``init`` optionally holds extra ``(x, y)`` starting pairs.
    """
    config = config or SolverConfig()
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if not space.is_norm:
        raise ValueError("two-point constants are only defined here for genuine norms")
    d = space.dim
    sign = -1.0 if mode == "james" else 1.0  # minimize sign * value

    cands = space.candidates()
    pairs = np.array(list(itertools.combinations(range(len(cands)), 2)))
    Xs, Ys = [cands[pairs[:, 0]]], [cands[pairs[:, 1]]]
    if init is not None:
        for x0, y0 in init:
            Xs.insert(0, space.normalize(np.atleast_2d(x0)))
            Ys.insert(0, space.normalize(np.atleast_2d(y0)))
    rng = config.rng(0)
    Xs.append(space.normalize(rng.standard_normal((SCREEN, d))))
    Ys.append(space.normalize(rng.standard_normal((SCREEN, d))))
    X, Y = np.concatenate(Xs), np.concatenate(Ys)
    vals = _batch_values(space, X, Y, mode)
    # every polished start is one restart of the local search
    order = np.argsort(sign * vals, kind="stable")[:min(POLISH, config.restarts)]

    def joint(z):
        u, v = z[:d], z[d:]
        if not np.any(u) or not np.any(v):
            return np.inf
        return sign * pair_value(space, space.normalize(u), space.normalize(v), mode)

    best = (sign * vals[order[0]], X[order[0]], Y[order[0]])
    for k in order:
        x, y = X[k], Y[k]
        res = minimize(joint, np.concatenate([x, y]), method="Nelder-Mead",
                       options={"maxiter": 400 * d, "xatol": 1e-10, "fatol": 1e-13})
        if np.isfinite(res.fun) and res.fun < sign * pair_value(space, x, y, mode):
            x, y = space.normalize(res.x[:d]), space.normalize(res.x[d:])
        for _ in range(3):
            for which in (0, 1):
                fixed = y if which == 0 else x

                def single(u, fixed=fixed, which=which):
                    if not np.any(u):
                        return np.inf
                    u = space.normalize(u)
                    return sign * (pair_value(space, u, fixed, mode) if which == 0
                                   else pair_value(space, fixed, u, mode))

                start = x if which == 0 else y
                r = minimize(single, start, method="Nelder-Mead",
                             options={"maxiter": 200 * d, "xatol": 1e-11, "fatol": 1e-14})
                if np.isfinite(r.fun) and r.fun < single(start):
                    if which == 0:
                        x = space.normalize(r.x)
                    else:
                        y = space.normalize(r.x)
        v = sign * pair_value(space, x, y, mode)
        if v < best[0]:
            best = (v, x, y)
    _, x, y = best
    return pair_value(space, x, y, mode), (x, y)
