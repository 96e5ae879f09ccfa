"""Maximin packing in the unit ball of a finite-dimensional (quasi)normed space.

Restarts are advanced together as a ``(R, N, d)`` array.  Each iteration
takes a normalized ascent step on the softmin ``-tau log sum exp(-d_ij/tau)``
of the pairwise dissimilarities and projects back with ``x / max(1, ||x||)``;
``tau`` is annealed geometrically.  The exact minimum of every iterate is
tracked, so the reported configuration is the best one actually visited.
"""

from __future__ import annotations

import itertools

import numpy as np

from .config import PackingResult, SolverConfig, min_pairwise, parallel_map

MODES = ("plain", "symmetric", "disjoint")
CHUNK = 16
PATIENCE = 500


def _pairs(N: int):
    i, j = np.triu_indices(N, 1)
    A = np.zeros((len(i), N))
    A[np.arange(len(i)), i] = 1.0
    A[np.arange(len(i)), j] = -1.0
    B = np.abs(A)
    return i, j, A, B


def _ascent_dir(space, X, pairs, tau, symmetric):
    i, j, A, B = pairs
    D = X[:, i] - X[:, j]
    dm = space.norm(D)
    G = space.grad(D)
    if symmetric:
        S = X[:, i] + X[:, j]
        dp = space.norm(S)
        allv = np.concatenate([dm, dp], axis=1)
    else:
        allv = dm
    m = allv.min(axis=1, keepdims=True)
    W = np.exp(-(allv - m) / tau)
    W /= W.sum(axis=1, keepdims=True)
    P = len(i)
    dirn = np.einsum("pn,rp,rpd->rnd", A, W[:, :P], G)
    if symmetric:
        GS = space.grad(S)
        dirn += np.einsum("pn,rp,rpd->rnd", B, W[:, P:], GS)
    return dirn, allv.min(axis=1)


def _project(space, X, mask):
    if mask is not None:
        X = X * mask
    n = np.asarray(space.norm(X))
    return X / np.maximum(1.0, n)[..., None]


def _run_chunk(space, X0, mask, symmetric, config: SolverConfig, iters: int):
    """Optimize a batch of starts; return best points, values and iteration counts."""
    pairs = _pairs(X0.shape[1])
    X = _project(space, X0, mask)
    R = len(X)
    best_val = np.full(R, -np.inf)
    best_X = X.copy()
    last_gain = np.zeros(R, dtype=int)
    taus = config.taus(iters)
    etas = config.steps(iters)
    it = 0
    for it in range(iters):
        dirn, cur = _ascent_dir(space, X, pairs, taus[it], symmetric)
        better = cur > best_val + 1e-15
        big = cur > best_val + config.tol * 1e-3
        best_val = np.where(better, cur, best_val)
        best_X[better] = X[better]
        last_gain[big] = it
        if it - last_gain.max() > PATIENCE:
            break
        if mask is not None:
            dirn = dirn * mask
        scale = np.linalg.norm(dirn, axis=2).max(axis=1)
        scale = np.where(scale > 0, scale, 1.0)
        X = _project(space, X + etas[it] * dirn / scale[:, None, None], mask)
    # score the final iterate too
    _, cur = _ascent_dir(space, X, pairs, taus[-1], symmetric)
    better = cur > best_val + 1e-15
    best_val = np.where(better, cur, best_val)
    best_X[better] = X[better]
    return best_X, best_val, it + 1


def greedy_farthest(space, cands: np.ndarray, N: int, start: int = 0, symmetric: bool = False) -> np.ndarray | None:
    """Greedy max-min selection of ``N`` rows from a candidate list."""
    if len(cands) < N:
        return None
    chosen = [start]
    dmin = np.full(len(cands), np.inf)
    for _ in range(N - 1):
        d = space.norm(cands - cands[chosen[-1]])
        if symmetric:
            d = np.minimum(d, space.norm(cands + cands[chosen[-1]]))
        dmin = np.minimum(dmin, d)
        dmin[chosen] = -np.inf
        chosen.append(int(np.argmax(dmin)))
    return cands[chosen]


def _structured_seeds(space, N, symmetric, blocks):
    d = space.dim
    seeds = []
    if blocks is not None:
        for pick in ("first", "flat"):
            X = np.zeros((N, d))
            for k, b in enumerate(blocks):
                if pick == "first":
                    X[k, b[0]] = 1.0
                else:
                    X[k, b] = 1.0
            seeds.append(space.normalize(X))
        return seeds
    E = np.eye(d)
    if N <= d:
        seeds.append(space.normalize(E[:N]))
    if N <= 2 * d:
        pm = np.array([s * E[k] for k in range(d) for s in (1.0, -1.0)])
        seeds.append(space.normalize(pm[:N]))
    cands = space.candidates()
    for start in range(min(2, len(cands))):
        g = greedy_farthest(space, cands, N, start=start, symmetric=symmetric)
        if g is not None:
            seeds.append(g)
    return seeds


def _random_start(space, N, rng, mask):
    X = rng.standard_normal((N, space.dim))
    if mask is not None:
        X = X * mask
        X[~mask.any(axis=1)] = 0.0
    n = np.asarray(space.norm(X))
    n = np.where(n > 0, n, 1.0)
    return X / n[:, None] * rng.uniform(0.7, 1.0)


def auto_blocks(space, N: int, config: SolverConfig) -> list[list[int]]:
    """Contiguous equal blocks for symmetric spaces, else hill-climbing (100 moves)."""
    d = space.dim
    blocks = [list(map(int, b)) for b in np.array_split(np.arange(d), N)]
    if space.is_symmetric or N == d:
        return blocks
    quick = config.with_(restarts=4, max_iters=150)
    rng = config.rng(10**6)

    def score(bl):
        return maximin_packing(space, N, "disjoint", blocks=bl, config=quick).separation

    best = score(blocks)
    for _ in range(100):
        src = int(rng.integers(N))
        if len(blocks[src]) < 2:
            continue
        dst = int(rng.integers(N - 1))
        dst += dst >= src
        coord = blocks[src][int(rng.integers(len(blocks[src])))]
        trial = [list(b) for b in blocks]
        trial[src].remove(coord)
        trial[dst] = sorted(trial[dst] + [coord])
        s = score(trial)
        if s > best:
            best, blocks = s, trial
    return blocks


def _check_blocks(space, N, blocks):
    if not space.is_coordinate:
        raise ValueError("disjoint packing requires a coordinate space")
    if N > space.dim:
        raise ValueError(f"N={N} exceeds the {space.dim} available disjoint blocks")
    if blocks is None or blocks == "auto":
        return None
    blocks = [sorted(int(c) for c in b) for b in blocks]
    flat = list(itertools.chain.from_iterable(blocks))
    if len(blocks) != N or any(not b for b in blocks) or len(set(flat)) != len(flat):
        raise ValueError("disjoint mode needs N nonempty pairwise disjoint blocks")
    if min(flat) < 0 or max(flat) >= space.dim:
        raise ValueError("block index outside the space dimension")
    return blocks


def maximin_packing(space, N: int, mode: str = "plain", blocks=None, config: SolverConfig | None = None,
                    init=None) -> PackingResult:
    """Best-of-restarts maximin configuration of ``N`` points in the unit ball.

    ``init`` may be one ``(N, d)`` array or a list of them; these are tried
    first, before the structured and random starts.  The result is a certified
    lower bound: ``separation`` is recomputed from the returned points.
    """
    config = config or SolverConfig()
    if N < 2:
        raise ValueError("N must be at least 2")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    diag: dict = {}
    mask = None
    if mode == "disjoint":
        blocks = _check_blocks(space, N, blocks)
        if blocks is None:
            blocks = auto_blocks(space, N, config)
        mask = np.zeros((N, space.dim), dtype=bool)
        for k, b in enumerate(blocks):
            mask[k, b] = True
    symmetric = mode == "symmetric"
    if not space.is_norm:
        diag["quasinorm"] = True
        diag["quasinorm_constant"] = space.quasinorm_constant

    starts = []
    if init is not None:
        arr = np.asarray(init, dtype=float)
        starts += list(arr) if arr.ndim == 3 else [arr]
    for s in starts:
        if s.shape != (N, space.dim):
            raise ValueError(f"init configurations must have shape {(N, space.dim)}")
    starts += _structured_seeds(space, N, symmetric, blocks)
    n_seeded = len(starts)
    R = max(config.restarts, n_seeded)
    starts += [None] * (R - len(starts))

    chunks = [list(range(a, min(a + CHUNK, R))) for a in range(0, R, CHUNK)]

    def work(idx):
        X0 = np.stack([starts[k] if starts[k] is not None else _random_start(space, N, config.rng(k), mask)
                       for k in idx])
        return _run_chunk(space, X0, mask, symmetric, config, config.max_iters)

    outs = parallel_map(work, chunks)
    X = np.concatenate([o[0] for o in outs])
    vals = np.concatenate([o[1] for o in outs])
    k = int(np.argmax(vals))  # ties -> lowest restart index
    pts = X[k]
    diag.update(restart_values=vals.tolist(), iterations=[o[2] for o in outs], best_restart=k,
                seeded=n_seeded)
    return PackingResult(points=pts, separation=min_pairwise(space, pts, "symmetric" if symmetric else "plain"),
                         mode=mode, blocks=blocks, diagnostics=diag)
