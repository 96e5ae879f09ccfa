"""Covering-radius minimization for the unit sphere or unit ball.

The objective ``max_p min_k ||p - c_k||`` over a probe set is smoothed with a
softmax over probes and a softmin over centers, both at an annealed
temperature, and minimized by normalized descent on a training subset of the
probes.  Exchange rounds then locate the worst uncovered points by local
maximization (Nelder-Mead), add them to the probe set and polish the centers
with an epigraph (SLSQP) formulation on each center's farthest probes.
The reported radius is recomputed exactly over the full probe set plus those
refined points; ``probe["resolution"]`` bounds how far the true sup over the
target can exceed it.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import cKDTree
from scipy.stats import norm as gaussian
from scipy.stats import qmc

from .config import CoveringResult, SolverConfig, covering_radius, nearest_distance, parallel_map
from .packing import greedy_farthest

TARGETS = ("sphere", "ball")
MAX_DIM = 8
TRAIN_SIZE = 256
STALL = 120
CHUNK = 16
EXCHANGE_ROUNDS = 8
PEAKS = 6
POLISH_TAUS = (1e-3, 1e-4, 1e-5, 1e-6, 1e-7)
ACTIVE_CAP = 1200
CUT_ROUNDS = 4


def _to_target(space, X, target):
    if target == "sphere":
        return space.normalize(X)
    return space.project_ball(X)


def probe_set(space, target: str, per_dim: int = 10_000, seed: int = 0) -> tuple[np.ndarray, str]:
    """Deterministic quasi-uniform sample of the sphere (or ball) of ``space``."""
    d = space.dim
    size = per_dim * d
    if d == 1:
        S = np.array([[1.0], [-1.0]]) / space.norm(np.array([[1.0], [-1.0]]))[:, None]
        desc = "two endpoints"
    elif d == 2:
        t = 2 * np.pi * (np.arange(size) + 0.5) / size
        S = np.stack([np.cos(t), np.sin(t)], axis=1)
        desc = f"{size} equally spaced angles, radially normalized"
    else:
        m = int(np.ceil(np.log2(size)))
        U = qmc.Sobol(d, scramble=True, seed=seed).random_base2(m)
        S = gaussian.ppf(np.clip(U, 1e-12, 1 - 1e-12))
        desc = f"{2 ** m} scrambled Sobol points, Gaussian-mapped and radially normalized"
    S = space.normalize(S)
    if target == "sphere":
        return S, desc
    # ball: the sphere itself plus radial layers
    if d == 1:
        r = (np.arange(size) + 0.5) / size
        B = np.concatenate([r, -r])[:, None] / space.norm(np.array([1.0]))
    else:
        r = qmc.Sobol(1, scramble=True, seed=seed).random_base2(int(np.ceil(np.log2(len(S)))))[: len(S), 0]
        B = S * (r ** (1.0 / d))[:, None]
    return np.concatenate([S, B, np.zeros((1, d))]), desc + "; plus radially scaled copies and the origin"


def probe_resolution(space, probes, target, n_test: int = 2000, seed: int = 1) -> float:
    """Estimated sup over the target of the distance to the nearest probe."""
    rng = np.random.default_rng(seed)
    T = rng.standard_normal((n_test, space.dim))
    T = space.normalize(T)
    if target == "ball":
        T = T * rng.random((n_test, 1)) ** (1.0 / space.dim)
    tree = cKDTree(probes)
    k = min(12, len(probes))
    _, idx = tree.query(T, k=k)
    idx = np.atleast_2d(idx.reshape(n_test, -1))
    d = space.norm(T[:, None, :] - probes[idx])
    return float(np.max(np.min(d, axis=1)))


def _descent(space, C0, P, target, config: SolverConfig, iters: int, tau0: float | None = None,
             step_scale: float = 1.0):
    """Smoothed minimax descent for a batch of center sets against probes ``P``."""
    C = _to_target(space, C0, target)
    R = len(C)
    best_val = np.full(R, np.inf)
    best_C = C.copy()
    taus = np.geomspace(tau0 or config.tau0 * 0.2, config.tau_min, max(iters, 2))
    etas = config.steps(iters, step_scale)
    stall = 0
    for it in range(iters):
        Dv = P[None, :, None, :] - C[:, None, :, :]  # (R, T, N, d)
        dist = space.norm(Dv)
        near = dist.min(axis=2)
        cur = near.max(axis=1)
        better = cur < best_val - 1e-15
        stall = 0 if np.any(cur < best_val - config.tol * 1e-3) else stall + 1
        best_val = np.where(better, cur, best_val)
        best_C[better] = C[better]
        if stall > STALL:
            break
        tau = taus[it]
        b = np.exp(-(dist - near[:, :, None]) / tau)
        b /= b.sum(axis=2, keepdims=True)
        h = -tau * np.log(np.exp(-(dist - near[:, :, None]) / tau).sum(axis=2)) + near
        a = np.exp((h - h.max(axis=1, keepdims=True)) / tau)
        a /= a.sum(axis=1, keepdims=True)
        G = space.grad(Dv)
        dirn = np.einsum("rt,rtn,rtnd->rnd", a, b, G)
        scale = np.linalg.norm(dirn, axis=2).max(axis=1)
        scale = np.where(scale > 0, scale, 1.0)
        C = _to_target(space, C + etas[it] * dirn / scale[:, None, None], target)
    near = space.norm(P[None, :, None, :] - C[:, None, :, :]).min(axis=2).max(axis=1)
    better = near < best_val
    best_val = np.where(better, near, best_val)
    best_C[better] = C[better]
    return best_C, best_val


def _active_set(space, C, P, cap: int):
    """Probes whose nearest-center distance is within 30% of the worst.

    A band (rather than a per-center top-k) keeps both ends of every cell in
    the set, so no side of a cell is left unconstrained by the polish.
    """
    nd = np.min(space.norm(P[:, None, :] - C[None, :, :]), axis=1)
    rows = np.nonzero(nd >= 0.7 * nd.max())[0]
    if len(rows) > cap:
        top = rows[np.argsort(-nd[rows], kind="stable")[: cap // 4]]
        rows = np.union1d(rows[:: max(1, len(rows) // cap)], top)
    return P[rows]


def _polish_once(space, C, A, target, tau: float):
    """Epigraph minimax step: ``min t`` s.t. ``softmin_k ||p - c_k|| <= t`` for ``p`` in ``A``.

    The softmin at temperature ``tau`` lets cell boundaries move (a fixed
    nearest-center assignment would freeze them).  Sphere centers are
    parametrized as ``z / ||z||``; ball centers carry ``||z|| <= 1``.
    """
    N, d = C.shape

    def centers(v):
        Z = v[:-1].reshape(N, d)
        return space.normalize(Z) if target == "sphere" else Z

    def soft(v):
        Cv = centers(v)
        Dv = A[:, None, :] - Cv[None, :, :]
        dist = space.norm(Dv)
        m = dist.min(axis=1, keepdims=True)
        e = np.exp(-(dist - m) / tau)
        return Cv, Dv, m[:, 0] - tau * np.log(e.sum(axis=1)), e / e.sum(axis=1, keepdims=True)

    def cons(v):
        return v[-1] - soft(v)[2]

    def cons_jac(v):
        Cv, Dv, _, W = soft(v)
        G = space.grad(Dv)  # (M, N, d); d/dc_k of ||p - c_k|| is -G[:, k]
        Gc = W[:, :, None] * G
        if target == "sphere":
            Z = v[:-1].reshape(N, d)
            nz = np.asarray(space.norm(Z))
            gz = space.grad(Z)
            Gc = (Gc - np.sum(Gc * Cv[None], axis=2, keepdims=True) * gz[None]) / nz[None, :, None]
        return np.concatenate([Gc.reshape(len(A), N * d), np.ones((len(A), 1))], axis=1)

    constraints = [{"type": "ineq", "fun": cons, "jac": cons_jac}]
    if target == "ball":
        constraints.append({"type": "ineq", "fun": lambda v: 1.0 - space.norm(v[:-1].reshape(N, d)),
                            "jac": lambda v: -_block_diag(space.grad(v[:-1].reshape(N, d)))})
    v0 = np.concatenate([C.ravel(), [0.0]])
    v0[-1] = float(np.max(soft(v0)[2]))
    res = minimize(lambda v: v[-1], v0, jac=lambda v: np.eye(len(v))[-1], method="SLSQP",
                   constraints=constraints, options={"maxiter": 200, "ftol": 1e-12})
    v = res.x if np.all(np.isfinite(res.x)) else v0
    C2 = centers(v)
    return (C2 if target == "sphere" else space.project_ball(C2)), float(v[-1])


def _polish(space, C, P, target, cap: int, tau: float, rounds: int = CUT_ROUNDS):
    """Cutting-plane wrapper around :func:`_polish_once`.

    The band active set is only valid near the starting centers; probes that
    the moved centers leave uncovered are added and the step is re-solved.
    """
    A = _active_set(space, C, P, cap)
    C2 = C
    for _ in range(rounds):
        C2, t = _polish_once(space, C, A, target, tau)
        nd = nearest_distance(space, C2, P)
        bad = nd > t + tau * np.log(len(C)) + 1e-12
        if not np.any(bad):
            break
        A = np.concatenate([A, _peak_probes(space, C2, P[bad]), P[bad][np.argsort(-nd[bad], kind="stable")[:cap // 4]]])
    return C2


def _block_diag(G):
    N, d = G.shape
    J = np.zeros((N, N * d + 1))
    for c in range(N):
        J[c, c * d:(c + 1) * d] = G[c]
    return J


def _refine_peak(space, C, p0, target):
    """Locally maximize the distance to the nearest center starting at ``p0``."""

    def f(z):
        p = _to_target(space, z[None, :], target)[0] if np.any(z) else p0
        return -float(np.min(space.norm(p[None, :] - C)))

    res = minimize(f, p0, method="Nelder-Mead",
                   options={"maxiter": 150 * space.dim, "xatol": 1e-9, "fatol": 1e-12})
    z = res.x if np.any(res.x) else p0
    return _to_target(space, z[None, :], target)[0]


def _peak_probes(space, C, P):
    """The farthest probe of every nearest-center cell, then the global top ``PEAKS``.

    One peak per cell matters: the global top probes tend to crowd around a
    single worst cell.
    """
    D = space.norm(P[:, None, :] - C[None, :, :])
    owner = D.argmin(axis=1)
    nd = D.min(axis=1)
    picks = []
    for k in range(len(C)):
        cell = np.flatnonzero(owner == k)
        if len(cell):
            picks.append(int(cell[np.argmax(nd[cell])]))
    picks += [int(i) for i in np.argsort(-nd, kind="stable")[:PEAKS]]
    return P[list(dict.fromkeys(picks))]


def _refine_all(space, C, P, target):
    return np.array([_refine_peak(space, C, p, target) for p in _peak_probes(space, C, P)])


def _seeds(space, N, target):
    seeds = []
    if target == "ball" and N == 1:
        seeds.append(np.zeros((1, space.dim)))
    cands = space.candidates()
    for start in range(min(2, len(cands))):
        g = greedy_farthest(space, cands, N, start=start)
        if g is not None:
            seeds.append(g)
    return seeds


def covering(space, N: int, target: str = "sphere", config: SolverConfig | None = None, init=None,
             max_dim: int = MAX_DIM, probes_per_dim: int = 10_000,
             exchange_rounds: int = EXCHANGE_ROUNDS) -> CoveringResult:
    """Best-of-restarts ``N``-center covering of the unit sphere or ball.

    Centers lie on the sphere when ``target="sphere"`` and in the ball
    otherwise.  The radius is an upper bound up to the reported probe
    resolution.  ``exchange_rounds`` caps the refine/polish rounds; fewer
    rounds give a looser but equally valid upper bound.
    """
    config = config or SolverConfig()
    if target not in TARGETS:
        raise ValueError(f"target must be one of {TARGETS}, got {target!r}")
    if N < 1:
        raise ValueError("N must be at least 1")
    if space.dim > max_dim:
        raise ValueError(f"infeasible probe budget: dim {space.dim} exceeds max_dim={max_dim}")
    probes, desc = probe_set(space, target, probes_per_dim, seed=config.seed & 0xFFFFFFFF)
    # a strided subsequence of a Sobol sample is not balanced, so the
    # training set is its own small sample plus the structured sphere points
    small, _ = probe_set(space, target, -(-TRAIN_SIZE // space.dim), seed=config.seed & 0xFFFFFFFF)
    train = np.concatenate([small, space.normalize(space.candidates())])

    starts = []
    if init is not None:
        arr = np.asarray(init, dtype=float)
        starts += list(arr) if arr.ndim == 3 else [arr]
    for s in starts:
        if s.shape != (N, space.dim):
            raise ValueError(f"init center sets must have shape {(N, space.dim)}")
    starts += _seeds(space, N, target)
    # each covering restart costs |train| x N norm evaluations per step, so
    # a quarter of the packing restart budget is used
    R = max(max(1, config.restarts // 4), len(starts))

    def start(k):
        if k < len(starts):
            return starts[k]
        return config.rng(k).standard_normal((N, space.dim))

    iters = max(50, config.max_iters // 5)
    chunks = [list(range(a, min(a + CHUNK, R))) for a in range(0, R, CHUNK)]
    outs = parallel_map(lambda idx: _descent(space, np.stack([start(k) for k in idx]), train, target, config, iters),
                        chunks)
    Cs = np.concatenate([o[0] for o in outs])
    vals = np.concatenate([o[1] for o in outs])
    if target == "sphere":
        Cs = space.normalize(Cs)

    # full-probe evaluation of the most promising restarts and of the raw seeds
    pool = [Cs[k] for k in np.argsort(vals, kind="stable")[:4]]
    pool += [_to_target(space, np.asarray(s, dtype=float), target) for s in starts]
    full = [covering_radius(space, C, probes) for C in pool]
    k_best = int(np.argmin(full))
    best_C = pool[k_best]

    extra = np.zeros((0, space.dim))
    rounds = []
    misses = 0
    for _ in range(exchange_rounds):
        extra = np.concatenate([extra, _refine_all(space, best_C, np.concatenate([probes, extra]), target)])
        C2 = best_C
        for tau in POLISH_TAUS:
            C2 = _polish(space, C2, np.concatenate([probes, extra]), target, ACTIVE_CAP, tau)
        # judge the candidate only after its own peaks have been hunted down
        extra = np.concatenate([extra, _refine_all(space, C2, np.concatenate([probes, extra]), target)])
        allp = np.concatenate([probes, extra])
        r_old = covering_radius(space, best_C, allp)
        r_new = covering_radius(space, C2, allp)
        rounds.append((r_old, r_new))
        if r_new < r_old - 1e-9 * r_old:
            best_C, misses = C2, 0
        else:
            # a failed round still adds the candidate's peaks to the probe set,
            # which changes the next polish; give up after two in a row
            misses += 1
            if misses == 2:
                break
    # final adversarial pass against the centers actually reported
    extra = np.concatenate([extra, _refine_all(space, best_C, np.concatenate([probes, extra]), target)])
    allp = np.concatenate([probes, extra])
    radius = covering_radius(space, best_C, allp)
    res = probe_resolution(space, probes, target)
    probe = {"description": desc, "size": len(allp), "refined": len(extra), "resolution": res}
    diag = {"restart_train_values": vals.tolist(), "best_pool_index": k_best, "exchange": rounds}
    return CoveringResult(centers=best_C, radius=radius, target=target, probes=allp, probe=probe,
                          diagnostics=diag)
