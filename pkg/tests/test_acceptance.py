"""Acceptance criteria 1-9 at their stated tolerances, default solver config.

Each test records one ``PASS``/``FAIL`` line (printed in the terminal
summary by ``conftest.py``) before asserting.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

import properties
from bcl import constants as C
from bcl import verify as V
from bcl.solvers import SolverConfig
from bcl.spaces import INF, Subspace, build_space, lp, random_polyhedral
from frozen import CIRCLE_COVERING, JAMES_GRID, SIMPLEX

DEFAULT = SolverConfig()
ALPHAS = (0.05, 0.1, 0.2)
ACCEPTANCE_LINES: list[str] = []


def record(k: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    print(ACCEPTANCE_LINES[-1])


def rotated_planes():
    E = build_space(lp(4, 2))
    base = Subspace(E, np.array([[1.0, 0, 0, 0], [0, 1.0, 0, 0]]))
    rot = [Subspace(E, np.array([[1.0, 0, 0, 0], [0, math.cos(a), math.sin(a), 0]])) for a in ALPHAS]
    return [base] + rot, (0.0,) + ALPHAS


@pytest.fixture(scope="module")
def lipschitz_report():
    subs, angles = rotated_planes()
    names = [f"a={a:g}" for a in angles]
    rep = V.check_lipschitz(subs, 3, ("kottman", "thickness"), DEFAULT, names=names)
    return rep, dict(zip(names, angles))


def test_criterion_1_lp_values():
    t0 = time.perf_counter()
    rep = V.check_lp_values((1, 1.5, 2, 3, INF), (4, 5, 6, 7, 8), DEFAULT, double_for_p1=False)
    elapsed = time.perf_counter() - t0
    worst = min(r.rhs - r.lhs for r in rep.rows)
    ok = rep.passed and elapsed < 120
    record(1, ok, f"{len(rep.rows)} rows, min(K_N - 2^(1/p)) = {worst:.2e}, {elapsed:.1f}s (< 120s)")
    assert rep.passed, [(r.param, r.lhs, r.rhs) for r in rep.rows if r.status == "fail"]
    assert elapsed < 120


def test_criterion_2_simplex():
    errs = {}
    for n in range(2, 7):
        est = C.kottman(build_space(lp(n, 2)), n + 1, config=DEFAULT)
        errs[n] = abs(est.value - SIMPLEX[n])
    ok = max(errs.values()) <= 1e-3
    record(2, ok, "max |K_{n+1} - sqrt(2(n+1)/n)| = " + f"{max(errs.values()):.2e} over n=2..6 (tol 1e-3)")
    assert ok, errs


def test_criterion_3_duality():
    exact = []
    for n in (2, 3, 4, 5):
        for p in (1, 1.5, 2, 3, INF):
            cert = C.duality_certificate(build_space(lp(n, p)), DEFAULT)
            exact.append(abs(cert.certified_product - 2))
    rng = np.random.default_rng(2024)
    poly = []
    for _ in range(20):
        cert = C.duality_certificate(build_space(random_polyhedral(rng)), DEFAULT)
        poly.append((cert.certified_product, cert.system.residual))
    ok_exact = max(exact) <= 1e-9
    ok_poly = all(c >= 2 - 1e-6 and r <= 1e-9 for c, r in poly)
    record(3, ok_exact and ok_poly,
           f"lp: max |product - 2| = {max(exact):.1e} (tol 1e-9); polyhedral: min (k+w)(k*+w) = "
           f"{min(c for c, _ in poly):.6f}, max residual = {max(r for _, r in poly):.1e}")
    assert ok_exact and ok_poly


def test_criterion_4_interpolation():
    thetas = (0, 0.25, 0.5, 0.75, 1)
    rep = V.check_interpolation(lp(6, 1), lp(6, INF), thetas, disjoint=True, config=DEFAULT)
    norm_rows = [r for r in rep.rows if "norm vs" in r.param]
    est_rows = [r for r in rep.rows if r.param.endswith("log-convex")]
    norm_ok = all(r.lhs <= 1e-6 for r in norm_rows)
    col = [abs(r.lhs - 2 ** (1 - th)) for r, th in zip(est_rows, thetas)]
    col_ok = max(col) <= 5e-3
    eq_ok = all(r.status == "pass" and abs(r.lhs - r.rhs) <= 5e-3 for r in est_rows)
    ok = norm_ok and col_ok and eq_ok and rep.passed
    record(4, ok, f"max norm mismatch {max(r.lhs for r in norm_rows):.1e} (tol 1e-6); "
                  f"max |K_disjoint - 2^(1-theta)| = {max(col):.1e} (tol 5e-3); log-convex rows tight")
    assert ok


def test_criterion_5_gap_lipschitz(lipschitz_report):
    rep, angle = lipschitz_report
    gap_err = []
    for r in rep.rows:
        if r.param.endswith(" gap"):
            a, b = r.param[: -len(" gap")].split("|")
            gap_err.append(abs(r.lhs - math.sin(abs(angle[a] - angle[b]))))
    transport = [r for r in rep.rows if "kottman" in r.param]
    ok = max(gap_err) <= 1e-6 and all(r.status == "pass" for r in transport)
    record(5, ok, f"max |gap - sin(alpha)| = {max(gap_err):.1e} (tol 1e-6); "
                  f"{sum(r.status == 'pass' for r in transport)}/{len(transport)} transport rows pass")
    assert ok


def test_criterion_6_pullback():
    rep = V.check_twisted(3, (0.5, 0.1, 0.01), 4, 1, DEFAULT, twisted_trend=False)
    gaps = [r for r in rep.rows if r.param.endswith(" gap")]
    diffs = [r for r in rep.rows if "kottman difference" in r.param]
    detail = "; ".join(f"{r.param.split()[0]}: gap {r.lhs:.6f} vs {r.rhs:g} [{r.status}]" for r in gaps)
    detail += f"; kottman difference rows {sum(r.status == 'pass' for r in diffs)}/{len(diffs)} pass"
    ok = all(r.status == "pass" for r in gaps + diffs)
    record(6, ok, detail)
    assert ok, detail


def test_criterion_7_thickness(lipschitz_report):
    errs = {}
    for N in range(3, 9):
        errs[N] = abs(C.thickness(build_space(lp(2, 2)), N, DEFAULT).value - CIRCLE_COVERING[N])
    rep, _ = lipschitz_report
    rows = [r for r in rep.rows if "thickness" in r.param]
    ok = max(errs.values()) <= 2e-3 and rows and all(r.status == "pass" for r in rows)
    record(7, ok, f"max |T_N - 2 sin(pi/2N)| = {max(errs.values()):.1e} over N=3..8 (tol 2e-3); "
                  f"{sum(r.status == 'pass' for r in rows)}/{len(rows)} thickness Lipschitz rows pass")
    assert ok, errs


def test_criterion_8_james():
    ps = (1, 1.2, 2, 4, INF)
    rep = V.check_identities([lp(2, p) for p in ps], DEFAULT, names=[f"p={p:g}" for p in ps], middle=False)
    jm_err = []
    for p in ps:
        jm, _ = C.james_constants(build_space(lp(2, p)), DEFAULT)
        jm_err.append(abs(jm.value - JAMES_GRID[p][0]))
    prod = [r.lhs for r in rep.rows if r.param.endswith("g*Jm")]
    ok = max(jm_err) <= 2e-3 and max(prod) <= 5e-3 and rep.passed
    record(8, ok, f"max |Jm - grid oracle| = {max(jm_err):.1e} (tol 2e-3); max |g*Jm - 2| = {max(prod):.1e} (tol 5e-3)")
    assert ok


def test_criterion_9_property_suites():
    outcome = {}
    for name, fn in properties.SUITES.items():
        t0 = time.perf_counter()
        try:
            fn()
            outcome[name] = (True, time.perf_counter() - t0, "")
        except Exception as exc:  # noqa: BLE001 -- every failure is reported, then re-raised below
            outcome[name] = (False, time.perf_counter() - t0, repr(exc)[:300])
    ok = all(v[0] for v in outcome.values())
    record(9, ok, "; ".join(f"{k}: {'ok' if v[0] else 'FAILED'} ({v[1]:.0f}s)" for k, v in outcome.items())
           + f" [{properties.EXAMPLES} examples each]")
    assert ok, {k: v[2] for k, v in outcome.items() if not v[0]}
