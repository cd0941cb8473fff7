from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from contextuality.dd import DDError, extreme_rays, facets_of_points, vertices_of_inequalities
from contextuality.lp import check_farkas, lp_feasibility, solve_standard


def test_simple_optimum():
    # min -x0 - x1 s.t. x0 + 2 x1 + s0 = 4, 3 x0 + x1 + s1 = 6
    A = [[1, 2, 1, 0], [3, 1, 0, 1]]
    res = solve_standard(A, [4, 6], [-1, -1, 0, 0])
    assert res.status == "optimal"
    assert res.value == Fraction(-14, 5)
    assert res.x[:2] == (Fraction(8, 5), Fraction(6, 5))


def test_infeasible_gives_farkas():
    A = [[1, 1], [1, 1]]
    b = [1, 2]
    res = lp_feasibility(A, b)
    assert res.status == "infeasible"
    assert check_farkas(A, b, res.farkas)


def test_unbounded_ray():
    res = solve_standard([[1, -1]], [1], [0, -1])
    assert res.status == "unbounded"
    r = res.ray
    assert r[0] - r[1] == 0 and -r[1] < 0


def test_redundant_rows_are_fine():
    res = solve_standard([[1, 1], [2, 2]], [1, 2], [1, 0])
    assert res.status == "optimal" and res.value == 0


@given(
    st.lists(st.lists(st.integers(-4, 4), min_size=5, max_size=5), min_size=3, max_size=3),
    st.lists(st.integers(-4, 4), min_size=3, max_size=3),
    st.lists(st.integers(0, 5), min_size=5, max_size=5),
)
def test_matches_reference_solver(A, b, c):
    # nonnegative costs keep the problem bounded whenever it is feasible
    res = solve_standard(A, b, c)
    ref = linprog(c, A_eq=np.array(A, float), b_eq=np.array(b, float), bounds=[(0, None)] * 5, method="highs")
    if res.status == "infeasible":
        assert ref.status == 2
        assert check_farkas(A, b, res.farkas)
    else:
        assert res.status == "optimal"
        assert ref.status == 0
        assert abs(float(res.value) - ref.fun) < 1e-7
        x = res.x
        assert all(v >= 0 for v in x)
        assert all(sum(a * v for a, v in zip(row, x)) == bi for row, bi in zip(A, b))


def test_cube_facets_and_vertices():
    pts = [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)]
    facets = facets_of_points(pts)
    assert len(facets) == 6
    A = [a for a, _ in facets]
    b = [beta for _, beta in facets]
    assert sorted(vertices_of_inequalities(A, b)) == sorted(tuple(Fraction(v) for v in p) for p in pts)


def test_lower_dimensional_rejected():
    with pytest.raises(DDError):
        facets_of_points([(0, 0), (1, 1), (2, 2)])


def test_unbounded_rejected():
    with pytest.raises(DDError):
        vertices_of_inequalities([[1, 0], [0, 1]], [1, 1])


def _canonical_planes(hull):
    planes = set()
    for eq in hull.equations:
        a = eq[:-1] / np.max(np.abs(eq[:-1]))
        planes.add(tuple(np.round(np.append(a, -eq[-1] / np.max(np.abs(eq[:-1]))), 6)))
    return planes


@given(st.lists(st.tuples(*[st.integers(-3, 3)] * 3), min_size=5, max_size=12, unique=True))
def test_facets_match_qhull(points):
    arr = np.array(points, float)
    if np.linalg.matrix_rank(arr[1:] - arr[0]) < 3:
        with pytest.raises(DDError):
            facets_of_points(points)
        return
    ours = set()
    for a, beta in facets_of_points(points):
        av = np.array([float(x) for x in a])
        s = np.max(np.abs(av))
        ours.add(tuple(np.round(np.append(av / s, float(beta) / s), 6)))
        # every point satisfies the facet and at least 3 are tight
        vals = [sum(x * y for x, y in zip(a, p)) for p in points]
        assert max(vals) == beta
        assert sum(v == beta for v in vals) >= 3
    assert ours == _canonical_planes(ConvexHull(arr))


def test_extreme_rays_of_orthant():
    rays = extreme_rays([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert sorted(rays) == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
