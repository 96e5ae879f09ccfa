"""Randomized property suites (100 hypothesis examples each).

Kept out of pytest collection on purpose: ``test_acceptance.py`` runs each
suite once as part of the acceptance criteria.
"""

from __future__ import annotations

import itertools
import os

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

import oracles
from bcl.constants import joint_ramsey, ramsey_extract
from bcl.solvers import (
    SolverConfig,
    brute_force_packing,
    covering,
    maximin_packing,
    min_pairwise,
    pair_value,
    subspace_gap,
    two_point_constant,
)
from bcl.solvers.config import covering_radius
from bcl.spaces import INF, Subspace, build_space, lp, random_polyhedral, weighted_lp

EXAMPLES = 100
LIGHT = SolverConfig(restarts=4, max_iters=250)
PROBES = 200
ROUNDS = 1  # feasibility and exact reporting do not depend on polish depth

suite = settings(max_examples=EXAMPLES, deadline=None, derandomize=True,
                 suppress_health_check=[HealthCheck.too_slow])


def random_space(seed: int):
    """A random small normed space: l_p, weighted l_p or a polyhedral plane."""
    rng = np.random.default_rng(seed)
    kind = seed % 3
    d = int(rng.integers(2, 4))
    p = INF if rng.random() < 0.15 else float(1 + 4 * rng.random())
    if kind == 0:
        return build_space(lp(d, p))
    if kind == 1:
        return build_space(weighted_lp(d, p, 0.5 + rng.random(d)))
    return build_space(random_polyhedral(rng))


def random_plane_pair(seed: int):
    rng = np.random.default_rng(seed)
    E = build_space(lp(4, 2))
    B1 = rng.standard_normal((2, 4))
    B2 = B1 + rng.uniform(0.01, 1.0) * rng.standard_normal((2, 4))
    return Subspace(E, B1), Subspace(E, B2), B1, B2


@suite
@given(seed=st.integers(0, 2**32 - 1), N=st.integers(2, 5))
def solver_feasibility(seed, N):
    X = random_space(seed)
    pk = maximin_packing(X, N, config=LIGHT)
    assert np.all(X.norm(pk.points) <= 1 + 1e-9)
    target = "sphere" if seed % 2 else "ball"
    cv = covering(X, min(N, 3), target, config=LIGHT, probes_per_dim=PROBES, exchange_rounds=ROUNDS)
    norms = X.norm(cv.centers)
    if target == "sphere":
        assert np.all(np.abs(norms - 1) <= 1e-9)
    else:
        assert np.all(norms <= 1 + 1e-9)


@suite
@given(seed=st.integers(0, 2**32 - 1), N=st.integers(2, 5))
def reporting_exactness(seed, N):
    X = random_space(seed)
    pk = maximin_packing(X, N, config=LIGHT)
    assert abs(pk.separation - min_pairwise(X, pk.points, "plain")) <= 1e-12
    cv = covering(X, min(N, 3), "sphere", config=LIGHT, probes_per_dim=PROBES, exchange_rounds=ROUNDS)
    assert abs(cv.radius - covering_radius(X, cv.centers, cv.probes)) <= 1e-12
    mode = "james" if seed % 2 else "g"
    v, (x, y) = two_point_constant(X, mode, LIGHT)
    assert abs(v - pair_value(X, x, y, mode)) <= 1e-12


@suite
@given(seed=st.integers(0, 2**32 - 1), N=st.integers(2, 5), run_seed=st.integers(0, 2**63 - 1))
def determinism_under_seed(seed, N, run_seed):
    X = random_space(seed)
    cfg = LIGHT.with_(seed=run_seed)
    a = maximin_packing(X, N, config=cfg)
    old = os.environ.get("BCL_THREADS")
    os.environ["BCL_THREADS"] = "1"
    try:
        b = maximin_packing(X, N, config=cfg)
    finally:
        if old is None:
            del os.environ["BCL_THREADS"]
        else:
            os.environ["BCL_THREADS"] = old
    assert np.array_equal(a.points, b.points) and a.separation == b.separation
    j1 = two_point_constant(X, "james", cfg)
    j2 = two_point_constant(X, "james", cfg)
    assert j1[0] == j2[0] and np.array_equal(j1[1][0], j2[1][0])


@suite
@given(seed=st.integers(0, 2**32 - 1), N=st.integers(2, 4))
def oracle_consistency(seed, N):
    X = random_space(seed)
    cands = X.candidates()
    N = min(N, len(cands))
    bf = brute_force_packing(X, N, candidates=cands)
    solved = maximin_packing(X, N, config=LIGHT, init=[bf.points])
    assert solved.separation >= bf.separation - 1e-9
    M, L, B1, B2 = random_plane_pair(seed)
    g = subspace_gap(M, L, LIGHT).g
    assert abs(g - oracles.plane_gap(B1, B2)) <= 1e-6


@suite
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 12), target=st.floats(0, 1), ties=st.booleans())
def ramsey_width_contract(seed, n, target, ties):
    rng = np.random.default_rng(seed)
    A = rng.uniform(0, 2, (n, n))
    if ties:
        A = np.round(A, 1)
    D = np.triu(A, 1) + np.triu(A, 1).T
    Bm = rng.uniform(0, 2, (n, n))
    E = np.triu(Bm, 1) + np.triu(Bm, 1).T
    sel = ramsey_extract(D, target)
    sp, sd = joint_ramsey(D, E, target)
    assert sp.indices == sd.indices
    for S, M in ((sel, D), (sp, D), (sd, E)):
        idx = S.indices
        assert len(idx) >= 2 and len(set(idx)) == len(idx) and all(0 <= i < n for i in idx)
        pairs = [M[i, j] for i, j in itertools.combinations(idx, 2)]
        # the reported interval is the direct scan of the selection
        assert S.lo == min(pairs) and S.hi == max(pairs)
    assert sel.width <= target or len(sel.indices) == 2
    assert (sp.width <= target and sd.width <= target) or len(sp.indices) == 2


SUITES = {
    "solver feasibility": solver_feasibility,
    "reporting exactness": reporting_exactness,
    "determinism under seed": determinism_under_seed,
    "oracle consistency": oracle_consistency,
    "ramsey width contract": ramsey_width_contract,
}
