"""Solver configuration and result containers."""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np


class NonConvergenceError(RuntimeError):
    """A solver failed to reach its certificate; ``diagnostics`` says how far it got."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class SolverConfig:
    restarts: int = 64
    max_iters: int = 2000
    step0: float = 0.2
    step_final: float = 1e-3
    tau0: float = 0.5
    tau_min: float = 1e-3
    seed: int = 42
    tol: float = 1e-6

    def __post_init__(self):
        for name in ("restarts", "max_iters", "step0", "tau0", "tau_min", "tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"SolverConfig.{name} must be positive")
        if not 0 < self.step_final <= 1:
            raise ValueError("SolverConfig.step_final must lie in (0, 1]")
        if not self.tau_min < self.tau0:
            raise ValueError("SolverConfig temperature must decrease: tau_min < tau0")

    def with_(self, **kw) -> "SolverConfig":
        return replace(self, **kw)

    def taus(self, iters: int) -> np.ndarray:
        """Geometric temperature schedule of length ``iters``."""
        return np.geomspace(self.tau0, self.tau_min, max(iters, 2))

    def steps(self, iters: int, scale: float = 1.0) -> np.ndarray:
        """Geometric step schedule from ``step0`` down to ``step0 * step_final``."""
        s0 = self.step0 * scale
        return np.geomspace(s0, s0 * self.step_final, max(iters, 2))

    def rng(self, index: int) -> np.random.Generator:
        """Per-restart stream derived from (master seed, restart index)."""
        return np.random.default_rng([self.seed & 0xFFFFFFFFFFFFFFFF, index])

    def fingerprint(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def worker_count() -> int:
    try:
        cap = int(os.environ.get("BCL_THREADS", "0"))
    except ValueError:
        cap = 0
    n = os.cpu_count() or 1
    return max(1, min(n, cap) if cap > 0 else n)


def parallel_map(fn, items) -> list:
    """Order-preserving map over a thread pool capped by ``BCL_THREADS``."""
    items = list(items)
    w = worker_count()
    if w == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=w) as ex:
        return list(ex.map(fn, items))


def covering_radius(space, centers: np.ndarray, probes: np.ndarray) -> float:
    """Exact max over ``probes`` of the distance to the nearest center."""
    return float(np.max(nearest_distance(space, centers, probes)))


def nearest_distance(space, centers: np.ndarray, probes: np.ndarray, chunk: int = 4096) -> np.ndarray:
    out = []
    for a in range(0, len(probes), chunk):
        P = probes[a:a + chunk]
        out.append(np.min(space.norm(P[:, None, :] - centers[None, :, :]), axis=1))
    return np.concatenate(out) if out else np.zeros(0)


def min_pairwise(space, P: np.ndarray, mode: str = "plain") -> float:
    """Exact min over pairs of the (symmetric) dissimilarity."""
    i, j = np.triu_indices(len(P), 1)
    d = space.norm(P[i] - P[j])
    if mode == "symmetric":
        d = np.minimum(d, space.norm(P[i] + P[j]))
    return float(np.min(d))


@dataclass
class PackingResult:
    points: np.ndarray
    separation: float
    mode: str = "plain"
    blocks: list | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return len(self.points)


@dataclass
class CoveringResult:
    centers: np.ndarray
    radius: float
    target: str
    probes: np.ndarray = field(repr=False, default_factory=lambda: np.zeros((0, 0)))
    probe: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    @property
    def probe_resolution(self) -> float:
        return float(self.probe.get("resolution", 0.0))


@dataclass
class GapResult:
    g_ML: float
    g_LM: float
    witness_ML: tuple
    witness_LM: tuple
    diagnostics: dict = field(default_factory=dict)

    @property
    def g(self) -> float:
        return max(self.g_ML, self.g_LM)


@dataclass
class AuerbachSystem:
    basis: np.ndarray
    duals: np.ndarray
    residual: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.basis)
