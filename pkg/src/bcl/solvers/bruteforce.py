"""Exact maximin over a finite candidate set (oracle for small instances).

The optimal value is one of the pairwise dissimilarities, so we binary
search over their sorted distinct values and test each threshold ``t`` for
an ``N``-clique in the graph ``{d_ij >= t}`` by bounded depth-first search.
"""

from __future__ import annotations

import itertools

import numpy as np

from .config import PackingResult, min_pairwise

NODE_BUDGET = 2_000_000
MAX_CANDIDATES = 2000


class BudgetExceeded(RuntimeError):
    pass


def grid_candidates(space, resolution: float) -> np.ndarray:
    """Boundary points of the cube ``[-1, 1]^d`` on a grid, radially normalized."""
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    d = space.dim
    ticks = np.linspace(-1.0, 1.0, int(round(2.0 / resolution)) + 1)
    pts = []
    for axis in range(d):
        for s in (-1.0, 1.0):
            for rest in itertools.product(ticks, repeat=d - 1):
                p = np.insert(np.array(rest, dtype=float), axis, s)
                pts.append(p)
    P = np.unique(np.round(np.array(pts), 12), axis=0)
    if len(P) > MAX_CANDIDATES:
        raise BudgetExceeded(f"grid yields {len(P)} candidates (cap {MAX_CANDIDATES})")
    return space.normalize(P)


def _has_clique(adj: np.ndarray, N: int, budget: list) -> list | None:
    n = len(adj)

    def dfs(clique, cands):
        budget[0] -= 1
        if budget[0] < 0:
            raise BudgetExceeded(f"node budget {NODE_BUDGET} exhausted")
        if len(clique) == N:
            return clique
        if len(clique) + len(cands) < N:
            return None
        for pos, v in enumerate(cands):
            if len(clique) + len(cands) - pos < N:
                break
            nxt = [u for u in cands[pos + 1:] if adj[v, u]]
            found = dfs(clique + [v], nxt)
            if found is not None:
                return found
        return None

    return dfs([], list(range(n)))


def brute_force_packing(space, N: int, candidates="extreme", mode: str = "plain",
                        budget: int = NODE_BUDGET) -> PackingResult:
    """Exact best ``N``-subset of the candidate set.

    ``candidates`` is ``"extreme"`` (the space's structured sphere points),
    ``("grid", resolution)``, or an explicit ``(M, d)`` array.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    if isinstance(candidates, str) and candidates == "extreme":
        C = space.candidates()
    elif isinstance(candidates, tuple) and candidates and candidates[0] == "grid":
        C = grid_candidates(space, float(candidates[1]))
    else:
        C = np.atleast_2d(np.asarray(candidates, dtype=float))
        if C.shape[1] != space.dim:
            raise ValueError(f"candidates must have length-{space.dim} rows")
        C = C / np.maximum(1.0, np.asarray(space.norm(C)))[:, None]
    C = np.unique(np.round(C, 14), axis=0)
    if len(C) > MAX_CANDIDATES:
        raise BudgetExceeded(f"{len(C)} candidates exceed the cap {MAX_CANDIDATES}")
    if len(C) < N:
        raise ValueError(f"only {len(C)} distinct candidates for N={N}")
    D = space.norm(C[:, None, :] - C[None, :, :])
    if mode == "symmetric":
        D = np.minimum(D, space.norm(C[:, None, :] + C[None, :, :]))
    vals = np.unique(D[np.triu_indices(len(C), 1)])
    left = [budget]
    lo, hi = 0, len(vals) - 1
    best = None
    # largest index t with an N-clique in {D >= vals[t]}; vals[0] always works
    while lo <= hi:
        mid = (lo + hi) // 2
        clique = _has_clique(D >= vals[mid], N, left)
        if clique is not None:
            best, lo = clique, mid + 1
        else:
            hi = mid - 1
    pts = C[best]
    return PackingResult(points=pts, separation=min_pairwise(space, pts, mode), mode=mode,
                         diagnostics={"candidates": len(C), "nodes_used": budget - left[0]})
