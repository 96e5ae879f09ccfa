"""Re-derive the frozen oracle literals used across the suite."""

from __future__ import annotations

import math

import numpy as np
import pytest

import oracles
from frozen import CALDERON_CASES, CIRCLE_COVERING, JAMES_GRID, SIMPLEX


@pytest.mark.parametrize("p", sorted(JAMES_GRID, key=str))
def test_james_grid_literals(p):
    j, g = oracles.james_grid(p)
    assert (j, g) == pytest.approx(JAMES_GRID[p], abs=1e-12)


@pytest.mark.parametrize("n", sorted(SIMPLEX))
def test_simplex_literals(n):
    assert oracles.simplex_separation(n) == pytest.approx(SIMPLEX[n], abs=1e-12)


@pytest.mark.parametrize("N", sorted(CIRCLE_COVERING))
def test_circle_covering_literals(N):
    assert oracles.circle_covering(N) == pytest.approx(CIRCLE_COVERING[N], abs=1e-12)


@pytest.mark.parametrize("case", CALDERON_CASES)
def test_calderon_factorization_literals(case):
    (p0, w0), (p1, w1), theta, x, expected = case
    assert oracles.calderon_factorization(x, p0, w0, p1, w1, theta) == pytest.approx(expected, rel=1e-9)


def test_calderon_oracle_reduces_to_lp_theta():
    x = np.array([0.3, -1.2, 0.7])
    v = oracles.calderon_factorization(x, 1, [1, 1, 1], math.inf, [1, 1, 1], 0.5)
    assert v == pytest.approx(np.linalg.norm(x), rel=1e-9)


def test_plane_gap_of_rotation():
    for a in (0.05, 0.1, 0.2):
        B2 = [[1, 0, 0, 0], [0, math.cos(a), math.sin(a), 0]]
        assert oracles.plane_gap([[1, 0, 0, 0], [0, 1, 0, 0]], B2) == pytest.approx(math.sin(a), abs=1e-14)
