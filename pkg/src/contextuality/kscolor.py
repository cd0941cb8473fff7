"""{0,1} colorings of orthogonality graphs under the Kochen-Specker rules.

Rule 1: two orthogonal (adjacent) projectors are never both assigned 1.
Rule 2: every declared complete basis has exactly one projector assigned 1.
Rule 2 is applied to declared bases only, not to every maximal clique.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .datasets import (
    PM_COLUMNS,
    PM_ROWS,
    PM_SIGNS,
    YU_OH_H,
    ProjectorSet,
    load_dataset,
    peres_mermin_inequality,
    verify_projector_dataset,
)
from .scenario import name_key

MAX_VERTICES = 24
DEFAULT_CAP = 10**6


class KsColorError(ValueError):
    pass


@dataclass(frozen=True)
class OrthogonalityStructure:
    vertices: tuple
    edges: frozenset
    bases: tuple
    marked: tuple = ()

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise KsColorError("duplicate vertex")
        for e in self.edges:
            if len(e) != 2 or not e <= vs:
                raise KsColorError(f"bad edge {sorted(e)}")
        for b in self.bases:
            if not set(b) <= vs:
                raise KsColorError(f"basis {b} uses unknown vertices")
            for u, v in itertools.combinations(b, 2):
                if frozenset((u, v)) not in self.edges:
                    raise KsColorError(f"basis {b} is not a clique: {u} and {v} are not adjacent")

    def neighbors(self, v) -> list:
        return sorted((next(iter(e - {v})) for e in self.edges if v in e), key=name_key)

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": sorted((sorted(e, key=name_key) for e in self.edges), key=lambda p: [name_key(x) for x in p]),
            "bases": [list(b) for b in self.bases],
            "marked": list(self.marked),
        }


def make_structure(vertices: Sequence, edges, bases: Sequence, marked: Sequence = ()) -> OrthogonalityStructure:
    return OrthogonalityStructure(
        tuple(vertices),
        frozenset(frozenset(e) for e in edges),
        tuple(tuple(b) for b in bases),
        tuple(marked),
    )


def structure_from_json(obj: Mapping) -> OrthogonalityStructure:
    try:
        return make_structure(obj["vertices"], obj["edges"], obj["bases"], obj.get("marked", ()))
    except (KeyError, TypeError) as exc:
        raise KsColorError(f"malformed structure: {exc}") from exc


def structure_from_dataset(ds: ProjectorSet | str) -> OrthogonalityStructure:
    if isinstance(ds, str):
        ds = load_dataset(ds)
    if ds.kind != "projectors":
        raise KsColorError(f"dataset {ds.name} is not a projector set")
    return make_structure(list(ds.operators), ds.orthogonal, ds.bases, ds.marked)


@dataclass(frozen=True)
class KsColoring:
    values: tuple  # (vertex, 0|1) pairs in structure order

    def as_dict(self) -> dict:
        return dict(self.values)

    def __getitem__(self, v):
        return self.as_dict()[v]


def rule_violations(s: OrthogonalityStructure, values: Mapping) -> list[str]:
    """Plain re-check of both rules on a full assignment."""
    bad = []
    for e in s.edges:
        u, v = sorted(e, key=name_key)
        if values[u] == 1 and values[v] == 1:
            bad.append(f"rule 1: {u} and {v} both 1")
    for b in s.bases:
        ones = sum(values[v] for v in b)
        if ones != 1:
            bad.append(f"rule 2: basis {list(b)} has {ones} ones")
    return bad


def _search_order(s: OrthogonalityStructure) -> list:
    mult = {v: sum(v in b for b in s.bases) for v in s.vertices}
    return sorted(s.vertices, key=lambda v: (-mult[v], name_key(v)))


def enumerate_colorings(s: OrthogonalityStructure, cap: int = DEFAULT_CAP) -> tuple[list[KsColoring], bool]:
    """All colorings obeying both rules, by backtracking with basis-level pruning.

    Returns (colorings, exact); ``exact`` is False when the count hit ``cap``.
    """
    if len(s.vertices) > MAX_VERTICES:
        raise KsColorError(f"{len(s.vertices)} vertices exceed the cap of {MAX_VERTICES}")
    order = _search_order(s)
    pos = {v: i for i, v in enumerate(order)}
    nbrs = {v: [pos[u] for u in s.neighbors(v)] for v in order}
    bases_of = {v: [] for v in order}
    basis_idx = [[pos[v] for v in b] for b in s.bases]
    for k, b in enumerate(s.bases):
        for v in b:
            bases_of[v].append(k)

    values = [-1] * len(order)
    found: list[KsColoring] = []

    def consistent(i: int) -> bool:
        v = order[i]
        if values[i] == 1 and any(values[j] == 1 for j in nbrs[v]):
            return False
        for k in bases_of[v]:
            vals = [values[j] for j in basis_idx[k]]
            ones = vals.count(1)
            if ones > 1 or (ones == 0 and -1 not in vals):
                return False
        return True

    def rec(i: int) -> bool:
        if i == len(order):
            found.append(KsColoring(tuple((v, values[pos[v]]) for v in s.vertices)))
            return len(found) < cap
        for val in (0, 1):
            values[i] = val
            if consistent(i) and not rec(i + 1):
                values[i] = -1
                return False
        values[i] = -1
        return True

    exact = rec(0)
    return found, exact


def parity_certificate(s: OrthogonalityStructure) -> dict | None:
    """Parity contradiction when every vertex lies in an even number of bases and the basis count is odd.

    Summing rule 2 over bases gives the (odd) number of bases; regrouping the
    same sum by vertex counts each assigned 1 an even number of times.
    """
    if not s.bases:
        return None
    mult = {v: sum(v in b for b in s.bases) for v in s.vertices}
    if len(s.bases) % 2 == 0 or any(m % 2 for m in mult.values()):
        return None
    return {
        "kind": "parity",
        "bases": len(s.bases),
        "sum_over_bases": len(s.bases),
        "vertex_multiplicities": mult,
        "sum_over_vertices": "even (every vertex counted an even number of times)",
    }


@dataclass(frozen=True)
class PropagationStep:
    vertex: str
    value: int
    reason: str


@dataclass(frozen=True)
class Propagation:
    values: dict
    trace: tuple
    conflict: str | None

    def to_json(self) -> dict:
        return {
            "values": self.values,
            "trace": [s.__dict__ for s in self.trace],
            "conflict": self.conflict,
        }


def propagate(s: OrthogonalityStructure, assumptions: Mapping) -> Propagation:
    """Unit propagation of both rules from partial assumptions, recording each forced value."""
    values: dict = {}
    trace: list[PropagationStep] = []

    def assign(v, val, reason) -> str | None:
        if v in values:
            if values[v] != val:
                return f"{v} forced to {val} ({reason}) but already {values[v]}"
            return None
        values[v] = val
        trace.append(PropagationStep(v, val, reason))
        return None

    for v, val in assumptions.items():
        if v not in s.vertices:
            raise KsColorError(f"unknown vertex {v}")
        err = assign(v, int(val), "assumed")
        if err:
            return Propagation(values, tuple(trace), err)
    changed = True
    while changed:
        changed = False
        for v in list(values):
            if values[v] == 1:
                for u in s.neighbors(v):
                    if values.get(u) == 1:
                        return Propagation(values, tuple(trace), f"rule 1: adjacent {v} and {u} both 1")
                    if u not in values:
                        assign(u, 0, f"rule 1: orthogonal to {v}")
                        changed = True
        for b in s.bases:
            ones = [v for v in b if values.get(v) == 1]
            free = [v for v in b if v not in values]
            if len(ones) > 1:
                return Propagation(values, tuple(trace), f"rule 2: basis {list(b)} has {ones} all 1")
            if not ones and not free:
                return Propagation(values, tuple(trace), f"rule 2: basis {list(b)} is all 0")
            if not ones and len(free) == 1:
                assign(free[0], 1, f"rule 2: last free vertex of basis {list(b)}")
                changed = True
            elif ones and free:
                for u in free:
                    assign(u, 0, f"rule 2: basis {list(b)} already has {ones[0]} = 1")
                changed = True
    return Propagation(values, tuple(trace), None)


@dataclass(frozen=True)
class ColorabilityReport:
    dataset: str
    realized: bool
    colorings: int
    exact: bool
    certificate: dict | None
    details: dict

    @property
    def ks_set(self) -> bool:
        return self.exact and self.colorings == 0

    def to_json(self) -> dict:
        return {
            "dataset": self.dataset,
            "realized_by_vectors": self.realized,
            "colorings": self.colorings,
            "exact": self.exact,
            "ks_set": self.ks_set,
            "certificate": self.certificate,
            "details": self.details,
        }


def ceg18_check(cap: int = DEFAULT_CAP) -> ColorabilityReport:
    ds = load_dataset("ceg18")
    realized = verify_projector_dataset(ds).ok
    s = structure_from_dataset(ds)
    cols, exact = enumerate_colorings(s, cap)
    return ColorabilityReport("ceg18", realized, len(cols), exact, parity_certificate(s), {})


def yu_oh_check(cap: int = DEFAULT_CAP) -> ColorabilityReport:
    """Every coloring gives sum of h-values <= 1 while the h projectors sum to (4/3) 1."""
    ds = load_dataset("yuoh13")
    report = verify_projector_dataset(ds)
    s = structure_from_dataset(ds)
    cols, exact = enumerate_colorings(s, cap)
    marked = s.marked or YU_OH_H
    h_sums = [sum(c[h] for h in marked) for c in cols]
    max_h = max(h_sums) if h_sums else 0
    quantum = sum(ds.operators[h] for h in marked)
    scale = float(np.trace(quantum).real) / quantum.shape[0]
    trace = propagate(s, {marked[0]: 1, marked[1]: 1})
    forced = sorted((st.vertex for st in trace.trace if st.value == 1 and st.reason != "assumed"), key=name_key)
    details = {
        "max_h_sum": max_h,
        "all_h_sums_at_most_1": all(x <= 1 for x in h_sums),
        "quantum_h_sum": str(Fraction(scale).limit_denominator(1000)),
        "quantum_h_sum_value": scale,
        "contradiction": f"noncontextual value <= {max_h} < {Fraction(scale).limit_denominator(1000)} = quantum value"
        if max_h < scale else None,
        "two_h_assumed": {"assumed": [marked[0], marked[1]], "forced_to_1": forced, "conflict": trace.conflict,
                          "trace": trace.to_json()["trace"]},
    }
    return ColorabilityReport("yuoh13", report.ok, len(cols), exact, None, details)


def _pm_assignments():
    names = [v for row in PM_ROWS for v in row]
    for bits in range(1 << len(names)):
        yield {v: (-1 if (bits >> (len(names) - 1 - i)) & 1 else 1) for i, v in enumerate(names)}


def peres_mermin_check(signs: Mapping | None = None) -> ColorabilityReport:
    """Brute force over the 512 +-1 assignments of the square.

    Counts assignments whose line products match ``signs`` (the quantum
    pattern by default), the count for the all-+1 pattern, and the largest
    value of the Peres-Mermin expression over assignments.
    """
    signs = dict(PM_SIGNS if signs is None else signs)
    relaxed = {line: 1 for line in PM_ROWS + PM_COLUMNS}
    ineq = peres_mermin_inequality()
    sat = relaxed_sat = 0
    best = None
    for a in _pm_assignments():
        prods = {line: a[line[0]] * a[line[1]] * a[line[2]] for line in PM_ROWS + PM_COLUMNS}
        if all(prods[line] == signs[line] for line in prods):
            sat += 1
        if all(prods[line] == relaxed[line] for line in prods):
            relaxed_sat += 1
        value = sum(int(ineq.coefficient(line)) * prods[line] for line in prods)
        best = value if best is None else max(best, value)
    realized = verify_projector_dataset(load_dataset("peresmermin")).ok
    details = {
        "assignments": 512,
        "satisfying_all_plus_pattern": relaxed_sat,
        "max_I_PM": best,
        "quantum_I_PM": 6,
        "sign_pattern": {"*".join(line): s for line, s in signs.items()},
    }
    cert = None
    if sat == 0:
        cert = {"kind": "product", "product_of_row_constraints": 1,
                "product_of_column_constraints": int(np.prod([signs[c] for c in PM_COLUMNS])),
                "note": "each value appears in one row and one column, so the row products and the column products multiply to the same number"}
    return ColorabilityReport("peresmermin", realized, sat, True, cert, details)


KS_CHECKS = {"ceg18": ceg18_check, "yuoh13": yu_oh_check, "peresmermin": peres_mermin_check}


def ks_check(dataset: str) -> ColorabilityReport:
    try:
        fn = KS_CHECKS[dataset]
    except KeyError:
        raise KsColorError(f"no KS check for dataset {dataset!r}; choose from {sorted(KS_CHECKS)}") from None
    return fn()
