"""Spec tree -> evaluation engine, plus duality operations."""

from __future__ import annotations

import numpy as np

from . import spec as S
from .calderon import CalderonSpace
from .normed import DirectSumSpace, LpSpace, NormedSpace, PolyhedralSpace, Subspace, VectorSumSpace
from .twisted import PullbackSpace, TwistedKPSpace


def build_space(spec: S.SpaceSpec, calderon: str = "auto") -> NormedSpace:
    """Validate ``spec`` and build its norm engine.

    ``calderon="solver"`` disables the closed form for products of l_p factors
    so the log-coordinate solver can be cross-checked against it.
    """
    if calderon not in ("auto", "solver"):
        raise ValueError(f"calderon must be 'auto' or 'solver', got {calderon!r}")
    S.validate(spec)
    return _build(spec, calderon == "solver")


def _build(spec, force: bool) -> NormedSpace:
    if isinstance(spec, S.Lp):
        return LpSpace(spec.n, spec.p, spec=spec)
    if isinstance(spec, S.WeightedLp):
        return LpSpace(spec.n, spec.p, spec.weights, spec=spec)
    if isinstance(spec, S.Polyhedral):
        return PolyhedralSpace(spec.functionals, spec=spec)
    if isinstance(spec, S.Calderon):
        return CalderonSpace([_build(f, force) for f in spec.factors], spec.weights, spec=spec,
                             force_solver=force)
    if isinstance(spec, S.DirectSum):
        return DirectSumSpace(spec.outer, [_build(s, force) for s in spec.summands], spec=spec)
    if isinstance(spec, S.VectorSum):
        return VectorSumSpace(_build(spec.lam, force), _build(spec.inner, force), spec=spec)
    if isinstance(spec, S.TwistedKP):
        return TwistedKPSpace(spec.n, spec.eps, spec=spec)
    if isinstance(spec, S.Pullback):
        return PullbackSpace(_build(spec.base, force), spec.eps, spec=spec)
    if isinstance(spec, S.SubspaceSpec):
        return Subspace(_build(spec.ambient, force), spec.basis, spec=spec)
    raise S.SpecError("kind", f"unknown spec object {spec!r}")


def norm(space: NormedSpace, x):
    return space.norm(x)


def dual_space(space: NormedSpace) -> NormedSpace:
    """Dual norm ``f -> max{<f, x> : ||x|| <= 1}``.

    Closed form for l_p families, LP-exact for polyhedral norms, convex-program
    exact when the norm has a cvxpy representation; otherwise the result carries
    ``meta["heuristic"] = True``.
    """
    if not space.is_norm:
        raise ValueError("dual_space is undefined for quasinormed spaces")
    return space.dual()


def koethe_dual(space: NormedSpace) -> NormedSpace:
    """Köthe dual of a coordinate space (equals the dual in finite dimension)."""
    if not space.is_coordinate:
        raise ValueError("koethe_dual requires a coordinate (Köthe) space")
    return space.dual()


def random_polyhedral(rng: np.random.Generator, n: int = 2, k: int | None = None) -> S.Polyhedral:
    """A random spanning polyhedral norm; handy for tests and sweeps."""
    k = k or int(rng.integers(n + 1, n + 6))
    while True:
        F = rng.standard_normal((k, n))
        if np.linalg.matrix_rank(F) == n:
            return S.polyhedral(F)
