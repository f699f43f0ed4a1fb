from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from scdim.exact_lp import l1_distance_point_affine, l1_distance_simplices, solve_lp


def test_small_lp():
    # min -x - y, x + y + s = 1
    r = solve_lp([-1, -1, 0], [[1, 1, 1]], [1])
    assert r.status == "optimal" and r.value == -1


def test_infeasible_and_unbounded():
    assert solve_lp([1, 1], [[1, 1]], [-1]).status == "infeasible"
    assert solve_lp([-1, 0], [[1, -1]], [0]).status == "unbounded"


def test_distances():
    seg = [(Fr(0), Fr(0)), (Fr(1), Fr(0))]
    pt = [(Fr(1, 2), Fr(3))]
    assert l1_distance_simplices(seg, pt) == 3
    assert l1_distance_simplices([(Fr(2), Fr(2))], seg) == 3
    assert l1_distance_point_affine((Fr(5), Fr(3)), seg) == 3


coord = st.integers(-6, 6).map(Fr)
point2 = st.tuples(coord, coord)


@given(st.lists(point2, min_size=1, max_size=3), st.lists(point2, min_size=1, max_size=3))
def test_simplex_distance_matches_scipy(P, Q):
    exact = l1_distance_simplices(P, Q)
    d, nP, nQ = 2, len(P), len(Q)
    c = [0] * (nP + nQ) + [1] * (2 * d)
    A, b = [], []
    for k in range(d):
        A.append([float(p[k]) for p in P] + [-float(q[k]) for q in Q] + [-(j == k) for j in range(d)] + [(j == k) for j in range(d)])
        b.append(0)
    A.append([1] * nP + [0] * (nQ + 2 * d)); b.append(1)
    A.append([0] * nP + [1] * nQ + [0] * (2 * d)); b.append(1)
    res = linprog(c, A_eq=np.array(A, float), b_eq=b, bounds=(0, None), method="highs")
    assert res.status == 0
    assert float(exact) == pytest.approx(res.fun, abs=1e-9)
    assert exact == l1_distance_simplices(Q, P)
