import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from contextuality import ncycle
from contextuality.polytope import (
    BooleInequality,
    PolytopeError,
    classify_facets,
    decide_contextuality,
    facet_enumeration,
    hrep_from_json,
    inequality_from_json,
    nc_vertices,
    positivity_inequalities,
    vertex_enumeration,
    witness_reproduces,
)
from contextuality.scenario import make_expectations, validate_scenario


def test_normalization_keeps_orientation():
    q = BooleInequality.make({"a": Fraction(2, 3), "b": Fraction(-4, 3)}, Fraction(2, 3))
    assert q.as_dict() == {("a",): 1, ("b",): -2}
    assert q.bound == 1
    assert q == BooleInequality.make({"b": -6, "a": 3}, 3)


def test_zero_inequality_rejected():
    with pytest.raises(PolytopeError):
        BooleInequality.make({"a": 0}, 1)


def test_sense_ge_is_flipped():
    q = inequality_from_json({"coefficients": {"a,b": 1}, "bound": -1, "sense": ">="})
    assert q == BooleInequality.make({"a,b": -1}, 1)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_enumeration_duality_nc(n):
    s = ncycle.ncycle_scenario(n)
    P = nc_vertices(s)
    F = facet_enumeration(P)
    back = vertex_enumeration(F, s.contexts)
    assert back.vertex_set() == P.vertex_set()


@pytest.mark.parametrize("n", [3, 4, 5])
def test_enumeration_duality_nd(n):
    P = ncycle.nd_vertices(n)
    F = facet_enumeration(P)
    assert len(F) == 4 * n
    assert vertex_enumeration(F, P.coordinates).vertex_set() == P.vertex_set()


@pytest.mark.parametrize("n", [3, 4, 5])
def test_boole_cuts_nd_down_to_nc(n):
    s = ncycle.ncycle_scenario(n)
    cut = positivity_inequalities(s) + ncycle.boole_inequalities(n)
    assert vertex_enumeration(cut, s.contexts).vertex_set() == nc_vertices(s).vertex_set()


@pytest.mark.parametrize("n", [3, 4, 5])
def test_facets_are_positivity_or_boole(n):
    s = ncycle.ncycle_scenario(n)
    kinds = classify_facets(s, facet_enumeration(nc_vertices(s)))
    boole = {q for q, k in kinds if k == "boole"}
    assert boole == set(ncycle.boole_inequalities(n))
    assert sum(k == "positivity" for _, k in kinds) == 4 * n


def test_enumeration_cap():
    s = validate_scenario([[f"X{i}", f"X{i + 1}"] for i in range(7)])
    with pytest.raises(PolytopeError):
        facet_enumeration(nc_vertices(s))


@st.composite
def nd_point(draw, n):
    P = ncycle.nd_vertices(n)
    w = draw(st.lists(st.integers(0, 5), min_size=len(P), max_size=len(P)).filter(any))
    total = sum(w)
    point = [sum(Fraction(wi, total) * v[i] for wi, v in zip(w, P.vertices)) for i in range(P.dimension)]
    return P, point


FACETS = {n: facet_enumeration(nc_vertices(ncycle.ncycle_scenario(n))) for n in (3, 4)}


@settings(max_examples=40)
@given(st.sampled_from([3, 4]).flatmap(lambda n: nd_point(n)))
def test_decide_agrees_with_facets(args):
    P, point = args
    n = len(P.coordinates) // 2
    s = ncycle.ncycle_scenario(n)
    vec = make_expectations(s, dict(zip(P.coordinates, point)))
    verdict = decide_contextuality(vec)
    values = vec.as_dict()
    violated = [f for f in FACETS[n] if not f.satisfied_by(values)]
    assert verdict.contextual == bool(violated)
    if verdict.contextual:
        assert verdict.certificate in FACETS[n]
        assert verdict.violation > 0
        assert verdict.certificate.lhs(values) - verdict.certificate.bound == verdict.violation
        for v in nc_vertices(s).vertices:
            assert verdict.farkas.satisfied_by(dict(zip(s.contexts, v)))
        assert not verdict.farkas.satisfied_by(values)
    else:
        assert witness_reproduces(verdict, vec)


def test_float_model_is_rationalized():
    r = ncycle.quantum_realization(5)
    verdict = decide_contextuality(r.model())
    assert verdict.contextual
    assert verdict.certificate == r.inequality
    assert abs(float(verdict.violation) - (r.value() - 3)) < 1e-9


def test_hrep_json():
    s = ncycle.ncycle_scenario(3)
    obj = {"scenario": s.to_json(), "inequalities": [q.to_json() for q in ncycle.boole_inequalities(3)]}
    s2, ineqs = hrep_from_json(obj)
    assert s2 == s and ineqs == ncycle.boole_inequalities(3)


def test_deterministic_vertices_are_noncontextual():
    s = ncycle.ncycle_scenario(4)
    rng = random.Random(3)
    for v in rng.sample(nc_vertices(s).vertices, 5):
        vec = make_expectations(s, dict(zip(s.contexts, v)))
        assert not decide_contextuality(vec).contextual
