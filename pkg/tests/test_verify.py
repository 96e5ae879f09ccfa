from __future__ import annotations

import math

import numpy as np
import pytest

from bcl import verify as V
from bcl.spaces import INF, Subspace, build_space, lp, polyhedral, weighted_lp


def test_row_status_and_report_status():
    rep = V.CheckReport("demo", {})
    rep.add("ok", 1.0, 1.0, 0.0)
    rep.add("info", 5.0, 1.0, 0.0, asserted=False)
    assert rep.status == "pass"
    rep.add("bad", 1.1, 1.0, 0.05)
    assert rep.status == "fail"
    assert [r["status"] for r in rep.to_dict()["rows"]] == ["pass", "reported", "fail"]


def test_nan_rows_fail():
    rep = V.CheckReport("demo", {})
    rep.fail("x", "solver blew up")
    assert rep.status == "fail"


@pytest.mark.parametrize("grid", [(), (1, 1), (1, 3, 2)])
def test_sweep_spec_rejects_bad_grids(grid):
    with pytest.raises(ValueError):
        V.SweepSpec("theta", grid)


def test_sweep_spec_accepts_decreasing():
    assert V.SweepSpec("eps", (0.5, 0.1, 0.01)).grid == (0.5, 0.1, 0.01)
    with pytest.raises(ValueError):
        V.SweepSpec("omega", (1, 2))


def test_exact_packing_values():
    assert V.exact_packing_value(lp(4, 1), 8, "plain") == 2
    assert V.exact_packing_value(lp(3, INF), 8, "plain") == 2
    assert V.exact_packing_value(lp(3, 2), 4, "plain") == pytest.approx(math.sqrt(8 / 3))
    assert V.exact_packing_value(lp(3, 3), 3, "disjoint") == pytest.approx(2 ** (1 / 3))
    assert V.exact_packing_value(lp(3, 3), 3, "plain") is None


def test_lp_values_small(fast):
    rep = V.check_lp_values((2, 1.5), (4, 5), fast)
    assert rep.passed
    assert len(rep.rows) == 4


def test_lp_values_p1_doubles(fast):
    rep = V.check_lp_values((1,), (3,), fast)
    assert [r.param for r in rep.rows] == ["p=1 n=3 N=3", "p=1 n=3 N=6"]
    assert rep.passed


def test_duality_suite(fast):
    H = polyhedral([[1, 0], [0.5, math.sqrt(3) / 2], [-0.5, math.sqrt(3) / 2]])
    rep = V.check_duality([lp(4, 3), H, weighted_lp(3, 2, [1, 2, 3])], fast)
    assert rep.passed
    assert rep.rows[0].rhs == pytest.approx(2.0, abs=1e-12)


def test_interpolation_disjoint_half(fast):
    rep = V.check_interpolation(lp(6, 1), lp(6, INF), (0.5,), disjoint=True, config=fast)
    assert rep.passed
    est = [r for r in rep.rows if r.param.endswith("log-convex")][0]
    assert est.lhs == pytest.approx(math.sqrt(2), abs=1e-6)
    assert est.rhs == pytest.approx(math.sqrt(2), abs=1e-12)


def test_interpolation_plain_l1_l2(fast):
    rep = V.check_interpolation(lp(5, 1), lp(5, 2), (0.25, 0.5, 0.75), config=fast)
    assert rep.passed


def test_interpolation_theta_zero_tight(fast):
    rep = V.check_interpolation(lp(4, 1), lp(4, 2), (0.0,), config=fast)
    row = [r for r in rep.rows if r.param.endswith("log-convex")][0]
    assert row.lhs == pytest.approx(row.rhs, abs=1e-6)


def test_interpolation_rejects_non_coordinate(fast):
    H = polyhedral([[1, 0], [0, 1], [1, 1]])
    with pytest.raises(ValueError):
        V.check_interpolation(H, lp(2, 2), (0.5,), config=fast)
    with pytest.raises(ValueError):
        V.check_interpolation(lp(2, 1), lp(3, 2), (0.5,), config=fast)


def test_lipschitz_identical_subspaces(fast):
    E = build_space(lp(4, 2))
    M = Subspace(E, np.eye(4)[:2])
    rep = V.check_lipschitz([M, M], 3, ("kottman", "james"), fast)
    assert rep.passed
    assert rep.rows[0].lhs == pytest.approx(0, abs=1e-12)


def test_lipschitz_perturbed_l1_planes(fast):
    E = build_space(lp(4, 1))
    rng = np.random.default_rng(0)
    B = rng.standard_normal((2, 4))
    subs = [Subspace(E, B), Subspace(E, B + 0.05 * rng.standard_normal((2, 4)))]
    rep = V.check_lipschitz(subs, 3, ("kottman",), fast)
    assert rep.passed


def test_twisted_half(fast):
    rep = V.check_twisted(3, (0.5,), 4, 1, fast, twisted_trend=False)
    assert rep.passed


def test_twisted_sanity_row_euclidean(fast):
    rep = V.check_twisted(2, (1.0,), 3, 2, fast, twisted_trend=False)
    diff = [r for r in rep.rows if "kottman difference" in r.param][0]
    assert diff.status == "pass" and diff.rhs == pytest.approx(2 * (1 + 1e-6))


def test_twisted_trend_rows_are_reported(fast):
    rep = V.check_twisted(2, (0.5,), 3, 1, fast)
    trend = [r for r in rep.rows if "twisted_kp" in r.param]
    assert trend and all(r.status == "reported" for r in trend)


def test_sum_formulas(fast):
    rep = V.check_sum_formulas(lp(3, 1), lp(3, INF), 3, fast, thickness_rows=False)
    assert rep.passed and rep.rows[0].rhs >= 2 - 1e-9
    rep = V.check_sum_formulas(lp(4, 2), lp(4, 2), 4, fast, thickness_rows=False)
    assert rep.passed and rep.rows[0].rhs >= math.sqrt(2) - 1e-9


def test_identities(fast):
    rep = V.check_identities([lp(2, 2), lp(2, 1), lp(2, 4)], fast)
    assert rep.passed
    assert all(r.status == "reported" for r in rep.rows if "K_s" in r.param)


def test_reports_reproducible(fast):
    a = V.check_identities([lp(2, 1.5)], fast)
    b = V.check_identities([lp(2, 1.5)], fast)
    assert a.to_dict() == b.to_dict()
