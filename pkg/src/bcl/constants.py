"""Named constants as solver runs with bound-side bookkeeping.

Sup-type quantities (packings, the James constant, the gap) are only ever
reported as lower bounds and inf-type quantities (coverings, the lower James
constant) only as upper bounds.  Also houses the Ramsey-type interval
extraction and the duality certificate built on an Auerbach system.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .solvers import auerbach as _auerbach
from .solvers import covering, maximin_packing, subspace_gap, two_point_constant
from .solvers.config import AuerbachSystem, SolverConfig

BOUND_SIDE = {
    "kottman_N": "lower",
    "kottman_symmetric_N": "lower",
    "kottman_disjoint_N": "lower",
    "thickness_N": "upper",
    "entropy_N": "upper",
    "james": "lower",
    "g_james": "upper",
    "gap": "lower",
}

_KOTTMAN_KIND = {"plain": "kottman_N", "symmetric": "kottman_symmetric_N", "disjoint": "kottman_disjoint_N"}


def _arr(x):
    return np.asarray(x, dtype=float).tolist()


@dataclass
class ConstantEstimate:
    kind: str
    value: float
    N: int | None = None
    witnesses: list = field(default_factory=list)
    config: SolverConfig = field(default_factory=SolverConfig)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in BOUND_SIDE:
            raise ValueError(f"unknown constant kind {self.kind!r}")

    @property
    def bound_side(self) -> str:
        return BOUND_SIDE[self.kind]

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "value": float(self.value),
            "bound_side": self.bound_side,
            "N": self.N,
            "seed": self.config.seed,
            "config_fingerprint": self.config.fingerprint(),
            "witnesses": [_arr(w) for w in self.witnesses],
        }
        if "probe_resolution" in self.diagnostics:
            out["probe_resolution"] = float(self.diagnostics["probe_resolution"])
        return out


def kottman(space, N: int, mode: str = "plain", blocks=None, config: SolverConfig | None = None,
            init=None) -> ConstantEstimate:
    config = config or SolverConfig()
    if mode not in _KOTTMAN_KIND:
        raise ValueError(f"mode must be one of {tuple(_KOTTMAN_KIND)}, got {mode!r}")
    res = maximin_packing(space, N, mode=mode, blocks=blocks, config=config, init=init)
    diag = {"blocks": res.blocks, "quasinorm": res.diagnostics.get("quasinorm", False), "result": res}
    return ConstantEstimate(_KOTTMAN_KIND[mode], res.separation, N, [res.points], config, diag)


def thickness(space, N: int, config: SolverConfig | None = None, init=None) -> ConstantEstimate:
    """``T_N``: best radius of an ``N``-point net of the sphere by sphere points."""
    config = config or SolverConfig()
    res = covering(space, N, "sphere", config=config, init=init)
    diag = {"probe_resolution": res.probe_resolution, "probe": res.probe["description"], "result": res}
    return ConstantEstimate("thickness_N", res.radius, N, [res.centers], config, diag)


def entropy_covering(space, N: int, config: SolverConfig | None = None, init=None) -> ConstantEstimate:
    """``e_N``: best radius of ``N`` free centers covering the unit ball."""
    config = config or SolverConfig()
    res = covering(space, N, "ball", config=config, init=init)
    diag = {"probe_resolution": res.probe_resolution, "probe": res.probe["description"], "result": res}
    return ConstantEstimate("entropy_N", res.radius, N, [res.centers], config, diag)


def james_constants(space, config: SolverConfig | None = None,
                    init=None) -> tuple[ConstantEstimate, ConstantEstimate]:
    """(James constant lower bound, lower James constant upper bound)."""
    config = config or SolverConfig()
    j, wj = two_point_constant(space, "james", config, init=init)
    g, wg = two_point_constant(space, "g", config, init=init)
    return (ConstantEstimate("james", j, None, list(wj), config),
            ConstantEstimate("g_james", g, None, list(wg), config))


def gap(M, L, config: SolverConfig | None = None) -> ConstantEstimate:
    config = config or SolverConfig()
    res = subspace_gap(M, L, config)
    wit = [res.witness_ML[0], res.witness_ML[1], res.witness_LM[0], res.witness_LM[1]]
    diag = {"g_ML": res.g_ML, "g_LM": res.g_LM, "outer": "heuristic multi-start", "result": res}
    return ConstantEstimate("gap", res.g, None, wit, config, diag)


# -- Ramsey-type extraction ---------------------------------------------------


@dataclass
class RamseySelection:
    indices: list
    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo


def _check_distances(D) -> np.ndarray:
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError("distance matrix must be square")
    if len(D) < 2:
        raise ValueError("need at least N = 2 points")
    if not np.allclose(D, D.T, atol=0, rtol=0) or np.any(D < 0) or np.any(np.diag(D) != 0):
        raise ValueError("distance matrix must be symmetric, nonnegative, with zero diagonal")
    return D


def _spread(D, idx):
    sub = D[np.ix_(idx, idx)][np.triu_indices(len(idx), 1)]
    return float(sub.min()), float(sub.max())


def _width(D, idx) -> float:
    lo, hi = _spread(D, idx)
    return hi - lo


def _largest_compatible(D, idx, a, b):
    """Largest subset of ``idx`` whose pairwise distances all lie in ``[a, b]``."""
    G = nx.Graph()
    G.add_nodes_from(idx)
    for p in range(len(idx)):
        for q in range(p + 1, len(idx)):
            i, j = idx[p], idx[q]
            if a <= D[i, j] <= b:
                G.add_edge(i, j)
    clique, _ = nx.max_weight_clique(G, weight=None)
    return sorted(int(c) for c in clique)


def _bisect_step(D, idx):
    lo, hi = _spread(D, idx)
    mid = 0.5 * (lo + hi)
    low = _largest_compatible(D, idx, lo, mid)
    high = _largest_compatible(D, idx, mid, hi)
    # larger subset wins; ties go to the lower half
    return high if len(high) > len(low) else low


def ramsey_extract(distances, target_width: float) -> RamseySelection:
    """Shrink to an index set whose pairwise distances span at most ``target_width``.

    Each step bisects the current distance interval and keeps the larger set
    compatible with one half (ties toward the lower half), then tightens the
    interval to the actual spread.  Stops at the target width or at a pair.
    """
    D = _check_distances(distances)
    if target_width < 0:
        raise ValueError("target_width must be nonnegative")
    idx = list(range(len(D)))
    lo, hi = _spread(D, idx)
    while hi - lo > target_width and len(idx) > 2:
        idx = _bisect_step(D, idx)
        lo, hi = _spread(D, idx)
    return RamseySelection(idx, lo, hi)


def joint_ramsey(Dp, Dd, target_width: float) -> tuple[RamseySelection, RamseySelection]:
    """Alternate bisection on two distance matrices over one shared index set."""
    Dp, Dd = _check_distances(Dp), _check_distances(Dd)
    if Dp.shape != Dd.shape:
        raise ValueError("primal and dual matrices must have the same size")
    idx = list(range(len(Dp)))
    turn = 0
    while len(idx) > 2:
        wp = _width(Dp, idx)
        wd = _width(Dd, idx)
        if wp <= target_width and wd <= target_width:
            break
        D = (Dp, Dd)[turn]
        if (wp, wd)[turn] > target_width:
            idx = _bisect_step(D, idx)
        turn = 1 - turn
    return RamseySelection(idx, *_spread(Dp, idx)), RamseySelection(idx, *_spread(Dd, idx))


# -- duality certificate -----------------------------------------------------


@dataclass
class DualityCertificate:
    primal: RamseySelection
    dual: RamseySelection
    k: float
    k_star: float
    width: float
    system: AuerbachSystem
    min_pair_product: float

    @property
    def product_lower(self) -> float:
        return self.k * self.k_star

    @property
    def certified_product(self) -> float:
        return (self.k + self.width) * (self.k_star + self.width)

    def to_dict(self) -> dict:
        return {
            "indices": list(self.primal.indices),
            "k": self.k,
            "k_star": self.k_star,
            "width": self.width,
            "product_lower": self.product_lower,
            "certified_product": self.certified_product,
            "min_pair_product": self.min_pair_product,
            "residual": self.system.residual,
        }


def duality_certificate(space, config: SolverConfig | None = None, target_width: float = 1e-2) -> DualityCertificate:
    """Primal/dual separations of one Auerbach system, refined jointly.

    For every selected pair ``<x*_i - x*_j, x_i - x_j> = 2``, hence
    ``||x_i - x_j|| * ||x*_i - x*_j||_* >= 2`` and ``(k + w)(k* + w) >= 2``.
    """
    config = config or SolverConfig()
    if not space.is_norm:
        raise ValueError("duality certificate needs a genuine norm")
    if space.dim < 2:
        raise ValueError("duality certificate needs dimension at least 2")
    sysm = _auerbach(space, config)
    X, F = sysm.basis, sysm.duals
    n = len(X)
    dual = space.dual()
    i, j = np.triu_indices(n, 1)
    Dp = np.zeros((n, n))
    Dd = np.zeros((n, n))
    Dp[i, j] = Dp[j, i] = space.norm(X[i] - X[j])
    Dd[i, j] = Dd[j, i] = dual.norm(F[i] - F[j])
    sp, sd = joint_ramsey(Dp, Dd, target_width)
    sel = np.array(sp.indices)
    a, b = np.triu_indices(len(sel), 1)
    prods = Dp[sel[a], sel[b]] * Dd[sel[a], sel[b]]
    return DualityCertificate(sp, sd, sp.lo, sd.lo, max(sp.width, sd.width), sysm, float(prods.min()))
