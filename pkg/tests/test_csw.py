import itertools
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from contextuality import ncycle
from contextuality.csw import (
    CswError,
    exclusivity_graph,
    family_graph,
    is_bell_scenario,
    lovasz_theta,
    make_graph,
    quantum_max,
    theta_closed_form,
    to_csw_form,
)
from contextuality.polytope import BooleInequality


@st.composite
def graphs(draw, max_n=9):
    n = draw(st.integers(2, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return make_graph(range(n), [p for p, keep in zip(pairs, mask) if keep])


def _alpha(g):
    return max(len(c) for c in nx.find_cliques(nx.complement(g.to_networkx())))


def _clique_cover_upper(g):
    coloring = nx.greedy_color(nx.complement(g.to_networkx()), strategy="largest_first")
    return max(coloring.values()) + 1


@settings(max_examples=25)
@given(graphs())
def test_sandwich(g):
    th = lovasz_theta(g)
    assert _alpha(g) - 1e-6 <= th.value <= _clique_cover_upper(g) + 1e-6
    assert th.gap <= 1e-7


@settings(max_examples=10)
@given(graphs(7), st.data())
def test_adding_an_edge_does_not_increase_theta(g, data):
    missing = [p for p in itertools.combinations(range(g.order), 2) if frozenset(p) not in g.edges]
    if not missing:
        return
    extra = data.draw(st.sampled_from(missing))
    bigger = make_graph(g.vertices, g.edge_list() + [extra])
    assert lovasz_theta(bigger).value <= lovasz_theta(g).value + 1e-6


def _cvxpy_theta(g):
    cp = pytest.importorskip("cvxpy")
    n = g.order
    B = cp.Variable((n, n), symmetric=True)
    cons = [B >> 0, cp.trace(B) == 1] + [B[i, j] == 0 for i, j in g.edge_list()]
    prob = cp.Problem(cp.Maximize(cp.sum(B)), cons)
    prob.solve(solver=cp.CLARABEL)
    return prob.value


@pytest.mark.parametrize("seed", range(4))
def test_against_cvxpy(seed):
    rng = np.random.default_rng(seed)
    n = 8
    edges = [p for p in itertools.combinations(range(n), 2) if rng.random() < 0.4]
    g = make_graph(range(n), edges)
    assert abs(lovasz_theta(g).value - _cvxpy_theta(g)) < 1e-6


def test_pentagon():
    g = make_graph(range(5), [(i, (i + 1) % 5) for i in range(5)])
    assert abs(lovasz_theta(g).value - math.sqrt(5)) < 1e-7


def test_degenerate_bipartite_optimum():
    # perfect graph with a non-unique optimal face; the plain dual fits stalled here
    edges = [(1, 4), (4, 5), (0, 4), (2, 4), (3, 5), (1, 6), (2, 7), (5, 7)]
    g = make_graph(range(8), edges)
    r = lovasz_theta(g)
    assert r.primal <= 4 + 1e-9 <= r.dual + 2e-9
    assert abs(r.value - 4) < 1e-6
    assert abs(lovasz_theta(g, gap_tol=1e-6).value - 4) < 1e-6


@pytest.mark.parametrize("family,n", [("prism", 4), ("mobius", 5), ("prism", 1)])
def test_closed_forms_only_where_valid(family, n):
    with pytest.raises(ValueError):
        theta_closed_form(family, n)


def test_csw_form_of_odd_cycle():
    q = ncycle.boole_inequalities(5)[-1]
    form = to_csw_form(q)
    assert len(form.events) == 10
    assert form.offset == 5 and form.scale == 2
    assert form.nc_bound == 4
    g = exclusivity_graph(form)
    assert g.order == 10


def test_csw_rejects_non_pair_terms():
    with pytest.raises(CswError):
        to_csw_form(BooleInequality.make({"a": 1, "a,b": 1}, 1))


@pytest.mark.parametrize("n", range(3, 11))
def test_quantum_max_matches_realization(n):
    r = ncycle.quantum_realization(n)
    res = quantum_max(r.inequality)
    assert abs(res.value - r.value()) < 1e-6
    assert res.upper_bound_only == (n % 2 == 0)
    assert is_bell_scenario(r.inequality) == (n % 2 == 0)


def test_family_graph_orders():
    assert family_graph("prism", 5).order == 10
    assert len(family_graph("mobius", 4).edges) == 12
