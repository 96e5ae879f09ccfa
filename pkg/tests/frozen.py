"""Oracle outputs frozen as literals (regenerated by tests/oracles.py; see test_oracles.py)."""

import math

# james_grid(p, m=3000): (max-min two-point value, min-max two-point value) on l_p^2
JAMES_GRID = {
    1: (1.9999999999999996, 1.0),
    1.2: (1.7817974362806783, 1.122462048309373),
    2: (1.4142135623730954, 1.414213562373095),
    4: (1.6817928305074292, 1.1892071150027212),
    math.inf: (2.0, 1.0000000000000002),
}

# simplex_separation(n): regular simplex with n + 1 unit vertices
SIMPLEX = {
    2: 1.7320508075688772,
    3: 1.6329931618554518,
    4: 1.5811388300841898,
    5: 1.5491933384829666,
    6: 1.5275252316519465,
}

# circle_covering(N): regular N-gon covering the unit circle, dense sampling
CIRCLE_COVERING = {
    3: 0.9999999999999997,
    4: 0.7653668647301795,
    5: 0.6180339887498948,
    6: 0.5176380902050414,
    7: 0.4450418679126284,
    8: 0.3901806440322565,
}

# calderon_factorization: ((p0, w0), (p1, w1), theta, x, value)
CALDERON_CASES = [
    ((1, [1, 2, 0.5]), (2, [1, 1, 3]), 0.3, [0.3, -1.2, 0.7], 2.5319681228836655),
    ((1.5, [2, 1, 1, 1]), (4, [1, 1, 1, 0.5]), 0.6, [1.0, 0.2, -0.5, 0.9], 1.4506449517858306),
]
