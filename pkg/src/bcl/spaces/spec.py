"""Declarative descriptions of finite-dimensional (quasi)normed spaces.

A space is described by a small tree of frozen dataclasses.  The tree is
validated once (:func:`validate`) and serialized to / from JSON documents with
the field names ``kind, n, p, weights, functionals, factors, weights_a, outer,
summands, lambda, inner, eps, ambient, basis, base``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Union

import numpy as np

INF = math.inf


class SpecError(ValueError):
    """Invalid space description; ``field`` names the offending JSON field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


@dataclass(frozen=True)
class Lp:
    n: int
    p: float
    kind = "lp"


@dataclass(frozen=True)
class WeightedLp:
    n: int
    p: float
    weights: tuple[float, ...]
    kind = "weighted_lp"


@dataclass(frozen=True)
class Polyhedral:
    n: int
    functionals: tuple[tuple[float, ...], ...]
    kind = "polyhedral"


@dataclass(frozen=True)
class Calderon:
    factors: tuple["SpaceSpec", ...]
    weights: tuple[float, ...]
    kind = "calderon"


@dataclass(frozen=True)
class DirectSum:
    outer: float
    summands: tuple["SpaceSpec", ...]
    kind = "direct_sum"


@dataclass(frozen=True)
class VectorSum:
    lam: "SpaceSpec"
    inner: "SpaceSpec"
    kind = "vector_sum"


@dataclass(frozen=True)
class TwistedKP:
    n: int
    eps: float
    kind = "twisted_kp"


@dataclass(frozen=True)
class Pullback:
    base: "SpaceSpec"
    eps: float
    kind = "pullback"


@dataclass(frozen=True)
class SubspaceSpec:
    ambient: "SpaceSpec"
    basis: tuple[tuple[float, ...], ...]
    kind = "subspace"


SpaceSpec = Union[
    Lp, WeightedLp, Polyhedral, Calderon, DirectSum, VectorSum, TwistedKP, Pullback, SubspaceSpec
]

COORDINATE_KINDS = ("lp", "weighted_lp", "calderon", "direct_sum", "vector_sum")


# -- convenience constructors -------------------------------------------------

def lp(n: int, p: float) -> Lp:
    return Lp(int(n), float(p))


def weighted_lp(n: int, p: float, weights) -> WeightedLp:
    return WeightedLp(int(n), float(p), tuple(float(w) for w in weights))


def polyhedral(functionals) -> Polyhedral:
    F = np.atleast_2d(np.asarray(functionals, dtype=float))
    return Polyhedral(F.shape[1], tuple(tuple(row) for row in F.tolist()))


def calderon(factors, weights) -> Calderon:
    return Calderon(tuple(factors), tuple(float(a) for a in weights))


def direct_sum(outer: float, summands) -> DirectSum:
    return DirectSum(float(outer), tuple(summands))


def vector_sum(lam: SpaceSpec, inner: SpaceSpec) -> VectorSum:
    return VectorSum(lam, inner)


def twisted_kp(n: int, eps: float) -> TwistedKP:
    return TwistedKP(int(n), float(eps))


def pullback(base: SpaceSpec, eps: float) -> Pullback:
    return Pullback(base, float(eps))


def subspace(ambient: SpaceSpec, basis) -> SubspaceSpec:
    B = np.atleast_2d(np.asarray(basis, dtype=float))
    return SubspaceSpec(ambient, tuple(tuple(row) for row in B.tolist()))


# -- structural queries -------------------------------------------------------

def dim(spec: SpaceSpec) -> int:
    """Dimension of the space described by ``spec`` (no validation)."""
    if isinstance(spec, (Lp, WeightedLp, Polyhedral)):
        return spec.n
    if isinstance(spec, Calderon):
        return dim(spec.factors[0])
    if isinstance(spec, DirectSum):
        return sum(dim(s) for s in spec.summands)
    if isinstance(spec, VectorSum):
        return dim(spec.lam) * dim(spec.inner)
    if isinstance(spec, TwistedKP):
        return 2 * spec.n
    if isinstance(spec, Pullback):
        return dim(spec.base)
    if isinstance(spec, SubspaceSpec):
        return len(spec.basis)
    raise SpecError("kind", f"unknown spec object {spec!r}")


def is_coordinate(spec: SpaceSpec) -> bool:
    """True when the norm is a lattice (Köthe) norm in the standard coordinates."""
    if isinstance(spec, (Lp, WeightedLp)):
        return True
    if isinstance(spec, Calderon):
        return all(is_coordinate(f) for f in spec.factors)
    if isinstance(spec, DirectSum):
        return all(is_coordinate(s) for s in spec.summands)
    if isinstance(spec, VectorSum):
        return is_coordinate(spec.lam) and is_coordinate(spec.inner)
    return False


def _check_p(p: float, field: str = "p") -> None:
    if not (isinstance(p, (int, float)) and (p >= 1.0 or p == INF)) or math.isnan(p):
        raise SpecError(field, f"exponent must lie in [1, inf], got {p!r}")


def validate(spec: SpaceSpec) -> int:
    """Check every invariant of the tree; returns the dimension."""
    if isinstance(spec, Lp):
        if spec.n < 1:
            raise SpecError("n", "dimension must be positive")
        _check_p(spec.p)
        return spec.n
    if isinstance(spec, WeightedLp):
        if spec.n < 1:
            raise SpecError("n", "dimension must be positive")
        _check_p(spec.p)
        if len(spec.weights) != spec.n:
            raise SpecError("weights", f"expected {spec.n} weights, got {len(spec.weights)}")
        w = np.asarray(spec.weights)
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise SpecError("weights", "weights must be finite and strictly positive")
        return spec.n
    if isinstance(spec, Polyhedral):
        F = np.asarray(spec.functionals, dtype=float)
        if F.ndim != 2 or F.shape[1] != spec.n:
            raise SpecError("functionals", f"functionals must be vectors of length {spec.n}")
        if not np.all(np.isfinite(F)):
            raise SpecError("functionals", "non-finite entry")
        if np.linalg.matrix_rank(F) < spec.n:
            raise SpecError("functionals", "functionals do not span the dual space")
        return spec.n
    if isinstance(spec, Calderon):
        if len(spec.factors) < 1 or len(spec.factors) != len(spec.weights):
            raise SpecError("weights_a", "one weight per factor is required")
        dims = {validate(f) for f in spec.factors}
        if len(dims) != 1:
            raise SpecError("factors", f"factors have different dimensions {sorted(dims)}")
        for f in spec.factors:
            if not is_coordinate(f):
                raise SpecError("factors", f"factor of kind {f.kind!r} is not a coordinate space")
        a = np.asarray(spec.weights, dtype=float)
        if np.any(a < 0) or not np.all(np.isfinite(a)):
            raise SpecError("weights_a", "weights must be non-negative")
        if abs(a.sum() - 1.0) > 1e-12:
            raise SpecError("weights_a", f"weights must sum to 1 (sum = {a.sum()!r})")
        return dims.pop()
    if isinstance(spec, DirectSum):
        _check_p(spec.outer, "outer")
        if not spec.summands:
            raise SpecError("summands", "at least one summand is required")
        return sum(validate(s) for s in spec.summands)
    if isinstance(spec, VectorSum):
        m = validate(spec.lam)
        k = validate(spec.inner)
        if not is_coordinate(spec.lam):
            raise SpecError("lambda", "the outer space of a vector sum must be a coordinate space")
        return m * k
    if isinstance(spec, TwistedKP):
        if spec.n < 1:
            raise SpecError("n", "dimension must be positive")
        if not (spec.eps >= 0) or not math.isfinite(spec.eps):
            raise SpecError("eps", "eps must be finite and >= 0")
        return 2 * spec.n
    if isinstance(spec, Pullback):
        d = validate(spec.base)
        if isinstance(spec.base, TwistedKP):
            raise SpecError("base", "pullback base must be a normed space")
        if d % 2:
            raise SpecError("base", f"base dimension must be even to split in half, got {d}")
        if not (spec.eps > 0) or not math.isfinite(spec.eps):
            raise SpecError("eps", "eps must be finite and > 0")
        return d
    if isinstance(spec, SubspaceSpec):
        d = validate(spec.ambient)
        B = np.asarray(spec.basis, dtype=float)
        if B.ndim != 2 or B.shape[0] < 1 or B.shape[1] != d:
            raise SpecError("basis", f"basis vectors must have the ambient dimension {d}")
        if not np.all(np.isfinite(B)):
            raise SpecError("basis", "non-finite entry")
        if np.linalg.matrix_rank(B) < B.shape[0]:
            raise SpecError("basis", "basis vectors are linearly dependent")
        return B.shape[0]
    raise SpecError("kind", f"unknown spec object {spec!r}")


# -- JSON ---------------------------------------------------------------------

def _p_to_json(p: float):
    return "inf" if p == INF else p


def _p_from_json(value, field: str) -> float:
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "+inf"):
            return INF
        try:
            return float(value)
        except ValueError:
            raise SpecError(field, f"cannot parse exponent {value!r}") from None
    if value is None:
        raise SpecError(field, "missing exponent")
    return float(value)


def to_dict(spec: SpaceSpec) -> dict[str, Any]:
    if isinstance(spec, Lp):
        return {"kind": "lp", "n": spec.n, "p": _p_to_json(spec.p)}
    if isinstance(spec, WeightedLp):
        return {"kind": "weighted_lp", "n": spec.n, "p": _p_to_json(spec.p), "weights": list(spec.weights)}
    if isinstance(spec, Polyhedral):
        return {"kind": "polyhedral", "n": spec.n, "functionals": [list(f) for f in spec.functionals]}
    if isinstance(spec, Calderon):
        return {"kind": "calderon", "factors": [to_dict(f) for f in spec.factors],
                "weights_a": list(spec.weights)}
    if isinstance(spec, DirectSum):
        return {"kind": "direct_sum", "outer": _p_to_json(spec.outer),
                "summands": [to_dict(s) for s in spec.summands]}
    if isinstance(spec, VectorSum):
        return {"kind": "vector_sum", "lambda": to_dict(spec.lam), "inner": to_dict(spec.inner)}
    if isinstance(spec, TwistedKP):
        return {"kind": "twisted_kp", "n": spec.n, "eps": spec.eps}
    if isinstance(spec, Pullback):
        return {"kind": "pullback", "base": to_dict(spec.base), "eps": spec.eps}
    if isinstance(spec, SubspaceSpec):
        return {"kind": "subspace", "ambient": to_dict(spec.ambient), "basis": [list(b) for b in spec.basis]}
    raise SpecError("kind", f"unknown spec object {spec!r}")


def _require(d: dict, key: str):
    if key not in d:
        raise SpecError(key, "required field is missing")
    return d[key]


def from_dict(d: dict[str, Any]) -> SpaceSpec:
    """Parse a JSON object into a spec tree and validate it."""
    spec = _from_dict(d)
    validate(spec)
    return spec


def _from_dict(d: dict[str, Any]) -> SpaceSpec:
    if not isinstance(d, dict):
        raise SpecError("kind", f"expected a JSON object, got {type(d).__name__}")
    kind = _require(d, "kind")
    try:
        if kind == "lp":
            return Lp(int(_require(d, "n")), _p_from_json(_require(d, "p"), "p"))
        if kind == "weighted_lp":
            return WeightedLp(int(_require(d, "n")), _p_from_json(_require(d, "p"), "p"),
                              tuple(float(w) for w in _require(d, "weights")))
        if kind == "polyhedral":
            F = [tuple(float(v) for v in f) for f in _require(d, "functionals")]
            n = int(d.get("n", len(F[0]) if F else 0))
            return Polyhedral(n, tuple(F))
        if kind == "calderon":
            return Calderon(tuple(_from_dict(f) for f in _require(d, "factors")),
                            tuple(float(a) for a in _require(d, "weights_a")))
        if kind == "direct_sum":
            return DirectSum(_p_from_json(_require(d, "outer"), "outer"),
                             tuple(_from_dict(s) for s in _require(d, "summands")))
        if kind == "vector_sum":
            return VectorSum(_from_dict(_require(d, "lambda")), _from_dict(_require(d, "inner")))
        if kind == "twisted_kp":
            return TwistedKP(int(_require(d, "n")), float(_require(d, "eps")))
        if kind == "pullback":
            return Pullback(_from_dict(_require(d, "base")), float(_require(d, "eps")))
        if kind == "subspace":
            return SubspaceSpec(_from_dict(_require(d, "ambient")),
                                tuple(tuple(float(v) for v in b) for b in _require(d, "basis")))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(kind, str(exc)) from None
    raise SpecError("kind", f"unknown space kind {kind!r}")


def load_spec(path: str | Path) -> SpaceSpec:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SpecError("json", f"{path}: {exc}") from None
    return from_dict(data)


def dump_spec(spec: SpaceSpec, path: str | Path) -> None:
    Path(path).write_text(json.dumps(to_dict(spec), indent=2) + "\n")


def describe(spec: SpaceSpec) -> str:
    """Short human-readable label, e.g. ``lp(4,2)``."""
    if isinstance(spec, Lp):
        return f"lp({spec.n},{_fmt_p(spec.p)})"
    if isinstance(spec, WeightedLp):
        return f"weighted_lp({spec.n},{_fmt_p(spec.p)})"
    if isinstance(spec, Polyhedral):
        return f"polyhedral({spec.n},{len(spec.functionals)})"
    if isinstance(spec, Calderon):
        inner = ",".join(f"{describe(f)}^{a:g}" for f, a in zip(spec.factors, spec.weights))
        return f"calderon[{inner}]"
    if isinstance(spec, DirectSum):
        return f"sum_{_fmt_p(spec.outer)}[" + ",".join(describe(s) for s in spec.summands) + "]"
    if isinstance(spec, VectorSum):
        return f"{describe(spec.lam)}({describe(spec.inner)})"
    if isinstance(spec, TwistedKP):
        return f"twisted_kp({spec.n},{spec.eps:g})"
    if isinstance(spec, Pullback):
        return f"pullback({describe(spec.base)},{spec.eps:g})"
    if isinstance(spec, SubspaceSpec):
        return f"subspace({describe(spec.ambient)},{len(spec.basis)})"
    return repr(spec)


def _fmt_p(p: float) -> str:
    return "inf" if p == INF else f"{p:g}"
