"""Noncontextual polytopes, contextuality decisions and exact enumeration.

Coordinates are the context expectations of a scenario, in the scenario's
canonical context order.  Everything here is exact: coordinates and
coefficients are Fractions (or ints), never floats.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import dd
from .lp import LPResult, solve_standard
from .scenario import (
    ExpectationVector,
    MarginalModel,
    MarginalScenario,
    MAX_OBSERVABLES,
    ScenarioError,
    canonical_context,
    context_key,
    probs_to_expectations,
)

MAX_ENUM_DIMENSION = 12
MAX_ENUM_VERTICES = 10_000


class PolytopeError(ValueError):
    pass


@dataclass(frozen=True)
class GlobalAssignment:
    values: tuple  # ((name, +1 | -1), ...) in scenario order

    def __getitem__(self, name):
        return dict(self.values)[name]

    def as_dict(self) -> dict:
        return dict(self.values)


def _coord_key(c):
    if isinstance(c, tuple) and all(isinstance(x, str) for x in c):
        return (0, context_key(c))
    return (1, repr(c))


@dataclass(frozen=True)
class BooleInequality:
    """sum(coefficient[c] * <c>) <= bound, stored normalized.

    Build through ``BooleInequality.make`` which scales the coefficients to
    coprime integers (positive scaling only, so the orientation is kept).
    """

    coefficients: tuple  # ((coordinate, Fraction), ...) nonzero, canonical order
    bound: Fraction
    label: str | None = field(default=None, compare=False)

    @classmethod
    def make(cls, coefficients: Mapping, bound, label: str | None = None, normalize: bool = True) -> "BooleInequality":
        items = []
        for c, v in coefficients.items():
            if isinstance(c, str):
                c = tuple(c.split(","))
            if isinstance(c, tuple) and all(isinstance(x, str) for x in c):
                c = canonical_context(c)
            v = Fraction(v)
            if v:
                items.append((c, v))
        if not items:
            raise PolytopeError("inequality is identically zero")
        items.sort(key=lambda cv: _coord_key(cv[0]))
        bound = Fraction(bound)
        if normalize:
            lcm = 1
            for _, v in items:
                lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
            g = 0
            for _, v in items:
                g = math.gcd(g, int(v * lcm))
            scale = Fraction(lcm, g)
            items = [(c, v * scale) for c, v in items]
            bound *= scale
        return cls(tuple(items), bound, label)

    def coefficient(self, context) -> Fraction:
        if isinstance(context, tuple) and all(isinstance(x, str) for x in context):
            context = canonical_context(context)
        return dict(self.coefficients).get(context, Fraction(0))

    def as_dict(self) -> dict:
        return dict(self.coefficients)

    def lhs(self, values: Mapping):
        """Left-hand side on a map coordinate -> value (missing coordinates are an error)."""
        return sum((v * values[c] for c, v in self.coefficients), 0)

    def lhs_vector(self, coords: Sequence, point: Sequence):
        return self.lhs(dict(zip(coords, point)))

    def satisfied_by(self, values: Mapping) -> bool:
        return self.lhs(values) <= self.bound

    def vector(self, coords: Sequence) -> tuple:
        d = self.as_dict()
        unknown = set(d) - set(coords)
        if unknown:
            raise PolytopeError(f"coefficients on unknown coordinates {sorted(unknown, key=_coord_key)}")
        return tuple(d.get(c, Fraction(0)) for c in coords)

    def contexts(self) -> tuple:
        return tuple(c for c, _ in self.coefficients)

    def to_json(self) -> dict:
        out = {
            "coefficients": {",".join(c) if isinstance(c, tuple) else str(c): _frac_str(v) for c, v in self.coefficients},
            "bound": _frac_str(self.bound),
            "sense": "<=",
        }
        if self.label is not None:
            out["label"] = self.label
        return out

    def __str__(self) -> str:
        parts = []
        for c, v in self.coefficients:
            name = "<" + "".join(c) + ">" if isinstance(c, tuple) else str(c)
            sign = "-" if v < 0 else "+"
            mag = abs(v)
            parts.append(f"{sign} {'' if mag == 1 else str(mag) + ' '}{name}")
        text = " ".join(parts)
        text = text[2:] if text.startswith("+ ") else "-" + text[2:]
        return f"{text} <= {self.bound}"


def _frac_str(v: Fraction) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def inequality_from_json(obj) -> BooleInequality:
    from .scenario import parse_number

    sense = obj.get("sense", "<=")
    coeffs = {k: Fraction(parse_number(v)) for k, v in obj["coefficients"].items()}
    bound = Fraction(parse_number(obj["bound"]))
    if sense == ">=":
        coeffs = {k: -v for k, v in coeffs.items()}
        bound = -bound
    elif sense != "<=":
        raise PolytopeError(f"unknown sense {sense!r}")
    return BooleInequality.make(coeffs, bound, obj.get("label"))


@dataclass(frozen=True)
class PolytopeV:
    coordinates: tuple
    vertices: tuple

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    def __len__(self) -> int:
        return len(self.vertices)

    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    def to_json(self) -> dict:
        return {
            "coordinates": [",".join(c) if isinstance(c, tuple) else str(c) for c in self.coordinates],
            "vertices": [[_frac_str(x) for x in v] for v in self.vertices],
        }


def assignment_point(scenario: MarginalScenario, assignment: Mapping) -> tuple:
    out = []
    for ctx in scenario.contexts:
        v = 1
        for n in ctx:
            v *= assignment[n]
        out.append(v)
    return tuple(out)


def global_assignments(scenario: MarginalScenario) -> Iterable[GlobalAssignment]:
    """All 2^k assignments, first observable as the most significant bit (+1 first)."""
    names = scenario.observables
    for bits in itertools.product((1, -1), repeat=len(names)):
        yield GlobalAssignment(tuple(zip(names, bits)))


def nc_vertices(scenario: MarginalScenario) -> PolytopeV:
    """Deterministic points of all global assignments, deduplicated, in enumeration order."""
    if len(scenario.observables) > MAX_OBSERVABLES:
        raise PolytopeError(f"more than {MAX_OBSERVABLES} observables")
    seen = {}
    for g in global_assignments(scenario):
        p = assignment_point(scenario, g.as_dict())
        seen.setdefault(p, None)
    return PolytopeV(scenario.contexts, tuple(seen))


def positivity_inequalities(scenario: MarginalScenario, maximal_only: bool = True) -> list[BooleInequality]:
    """2^m p(o|C) >= 0 for every context C and outcome o, in expectation coordinates.

    Positivity on a sub-context follows from positivity on any context
    containing it, so by default only maximal contexts are listed.
    """
    out = []
    for ctx in (scenario.maximal_contexts if maximal_only else scenario.contexts):
        m = len(ctx)
        for signs in itertools.product((1, -1), repeat=m):
            coeffs = {}
            for r in range(1, m + 1):
                for idx in itertools.combinations(range(m), r):
                    chi = 1
                    for i in idx:
                        chi *= signs[i]
                    coeffs[tuple(ctx[i] for i in idx)] = -chi
            lab = "p(" + "".join("+" if s > 0 else "-" for s in signs) + "|" + ",".join(ctx) + ")>=0"
            out.append(BooleInequality.make(coeffs, 1, label=lab))
    return out


def classify_facets(scenario: MarginalScenario, facets: Iterable[BooleInequality]) -> list[tuple[BooleInequality, str]]:
    pos = {f: f.label for f in positivity_inequalities(scenario)}
    out = []
    for f in facets:
        if f in pos:
            out.append((BooleInequality(f.coefficients, f.bound, pos[f]), "positivity"))
        else:
            out.append((f, "boole"))
    return out


def _check_enum_size(dim: int, count: int | None = None) -> None:
    if dim > MAX_ENUM_DIMENSION:
        raise PolytopeError(f"ambient dimension {dim} exceeds the enumeration cap {MAX_ENUM_DIMENSION}")
    if count is not None and count > MAX_ENUM_VERTICES:
        raise PolytopeError(f"{count} vertices exceed the enumeration cap {MAX_ENUM_VERTICES}")


def facet_enumeration(polytope: PolytopeV) -> list[BooleInequality]:
    """Irredundant facet list of a full-dimensional polytope, sorted canonically."""
    _check_enum_size(polytope.dimension, len(polytope.vertices))
    try:
        pairs = dd.facets_of_points(polytope.vertices)
    except dd.DDError as exc:
        raise PolytopeError(str(exc)) from None
    out = [BooleInequality.make(dict(zip(polytope.coordinates, a)), beta) for a, beta in pairs]
    return sorted(out, key=lambda f: (f.bound, tuple(f.vector(polytope.coordinates))))


def vertex_enumeration(inequalities: Sequence[BooleInequality], coordinates: Sequence) -> PolytopeV:
    """Vertices of {x : every inequality holds}, coordinates in the given order."""
    coordinates = tuple(coordinates)
    _check_enum_size(len(coordinates))
    A = [ineq.vector(coordinates) for ineq in inequalities]
    b = [ineq.bound for ineq in inequalities]
    try:
        verts = dd.vertices_of_inequalities(A, b)
    except dd.DDError as exc:
        raise PolytopeError(str(exc)) from None
    return PolytopeV(coordinates, tuple(sorted(verts, key=lambda v: tuple(-x for x in v))))


@dataclass(frozen=True)
class ContextualityVerdict:
    """Verdict with a checkable witness.

    Noncontextual: ``mixture`` is a tuple of (GlobalAssignment, weight).
    Contextual: ``certificate`` is a facet of the noncontextual polytope that
    the input violates by ``violation`` (lhs minus bound); ``farkas`` is the
    raw separating inequality read from the infeasible Fine system.
    """

    verdict: str
    mixture: tuple | None = None
    certificate: BooleInequality | None = None
    violation: Fraction | None = None
    farkas: BooleInequality | None = None

    @property
    def contextual(self) -> bool:
        return self.verdict == "contextual"

    def to_json(self) -> dict:
        out: dict = {"verdict": self.verdict}
        if self.mixture is not None:
            out["witness"] = [
                {"assignment": {n: v for n, v in g.values}, "weight": _frac_str(w)} for g, w in self.mixture
            ]
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
            out["violation"] = _frac_str(self.violation)
            out["violation_float"] = float(self.violation)
        if self.farkas is not None:
            out["farkas"] = self.farkas.to_json()
        return out


def _as_exact_vector(model) -> ExpectationVector:
    if isinstance(model, MarginalModel):
        model = probs_to_expectations(model)
    if not isinstance(model, ExpectationVector):
        raise TypeError("expected a MarginalModel or ExpectationVector")
    return model if model.exact else model.rationalized()


def decide_contextuality(model: MarginalModel | ExpectationVector) -> ContextualityVerdict:
    """Fine-theorem decision by exact linear programming.

    The unknowns are the weights of the 2^k global assignments.  Matching the
    correlator of every context (plus normalization) is an invertible linear
    re-encoding of matching every probability table, so the system has one
    row per context rather than one per table entry.  On infeasibility the
    Farkas vector is a separating inequality; it is then sharpened to the
    facet of the noncontextual polytope that maximizes the gauge
    ``a.e`` over the polar ``{a : a.v <= 1 for all vertices v}``, which is a
    facet because simplex optima are vertices of the polar.
    """
    vec = _as_exact_vector(model)
    scenario = vec.scenario
    if len(scenario.observables) > MAX_OBSERVABLES:
        raise PolytopeError(f"more than {MAX_OBSERVABLES} observables")
    assignments = list(global_assignments(scenario))
    points = [assignment_point(scenario, g.as_dict()) for g in assignments]
    rows = [[1] * len(points)]
    for i in range(scenario.dimension):
        rows.append([p[i] for p in points])
    rhs = [Fraction(1)] + list(vec.entries)
    res = solve_standard(rows, rhs)
    if res.feasible:
        mixture = tuple((g, w) for g, w in zip(assignments, res.x) if w)
        return ContextualityVerdict("noncontextual", mixture=mixture)
    y = res.farkas
    # y0 + y.v <= 0 on every vertex and y0 + y.e > 0: so -y.v >= y0 ...
    # i.e. the inequality y.x <= -y0 holds on the polytope and fails at e
    farkas = BooleInequality.make(dict(zip(scenario.contexts, y[1:])), -y[0], label="farkas")
    facet = _deepest_facet(scenario, points, vec)
    violation = facet.lhs(vec.as_dict()) - facet.bound
    return ContextualityVerdict("contextual", certificate=facet, violation=violation, farkas=farkas)


def _deepest_facet(scenario: MarginalScenario, points: Sequence[tuple], vec: ExpectationVector) -> BooleInequality:
    # maximize a.e subject to a.v <= 1, a free: split a = a+ - a-, add slacks
    d = scenario.dimension
    nv = len(points)
    A = []
    for k, p in enumerate(points):
        A.append(list(p) + [-x for x in p] + [1 if j == k else 0 for j in range(nv)])
    b = [1] * nv
    e = list(vec.entries)
    c = [-x for x in e] + list(e) + [0] * nv
    res: LPResult = solve_standard(A, b, c)
    if res.status != "optimal":
        raise PolytopeError("polar program did not reach an optimum")
    a = [res.x[i] - res.x[d + i] for i in range(d)]
    return BooleInequality.make(dict(zip(scenario.contexts, a)), 1)


def witness_reproduces(verdict: ContextualityVerdict, vec: ExpectationVector) -> bool:
    """Independent re-check of a noncontextual witness against the correlators."""
    scenario = vec.scenario
    total = [Fraction(0)] * scenario.dimension
    mass = Fraction(0)
    for g, w in verdict.mixture:
        if w < 0:
            return False
        mass += w
        for i, x in enumerate(assignment_point(scenario, g.as_dict())):
            total[i] += w * x
    target = _as_exact_vector(vec).entries
    return mass == 1 and tuple(total) == tuple(target)


def hrep_from_json(obj) -> tuple[MarginalScenario, list[BooleInequality]]:
    from .scenario import scenario_from_json

    scenario = scenario_from_json(obj["scenario"])
    ineqs = [inequality_from_json(x) for x in obj["inequalities"]]
    for q in ineqs:
        for c in q.contexts():
            if c not in scenario:
                raise ScenarioError(f"inequality uses unknown context {','.join(c)}")
    return scenario, ineqs
