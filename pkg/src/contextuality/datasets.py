"""Bundled projector and observable sets with their defining relations.

Each dataset carries the relations it is supposed to satisfy; the
verification routine evaluates every relation numerically and reports the
largest deviation, so no vector table is trusted without a check.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .polytope import BooleInequality
from .quantum import SIGMA_X, SIGMA_Y, SIGMA_Z, ket, projector
from .scenario import canonical_context

RELATION_TOL = 1e-10
I2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class Relation:
    name: str
    deviation: Callable[[Mapping], float]


@dataclass(frozen=True)
class ProjectorSet:
    """Labeled operators with declared orthogonalities and complete bases.

    ``kind`` is "projectors" (rank-one projectors from ``vectors``) or
    "observables" (dichotomic operators, as in the Peres-Mermin square).
    """

    name: str
    kind: str
    operators: dict
    vectors: dict = field(default_factory=dict)
    orthogonal: tuple = ()
    bases: tuple = ()
    relations: tuple = ()
    marked: tuple = ()


@dataclass(frozen=True)
class RelationCheck:
    name: str
    deviation: float
    passed: bool


@dataclass(frozen=True)
class DatasetReport:
    name: str
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {
            "dataset": self.name,
            "ok": self.ok,
            "checks": [{"relation": c.name, "deviation": c.deviation, "passed": c.passed} for c in self.checks],
        }


def _maxabs(M) -> float:
    return float(np.max(np.abs(M)))


def _structural_relations(ds: ProjectorSet) -> list[Relation]:
    rels = []
    ops = ds.operators
    if ds.kind == "projectors":
        for n in ops:
            rels.append(Relation(f"{n} is a Hermitian idempotent", lambda o, n=n: max(_maxabs(o[n] @ o[n] - o[n]), _maxabs(o[n] - o[n].conj().T))))
        for a, b in ds.orthogonal:
            rels.append(Relation(f"{a} orthogonal to {b}", lambda o, a=a, b=b: _maxabs(o[a] @ o[b])))
        for basis in ds.bases:
            rels.append(Relation("complete basis {" + ",".join(basis) + "}", lambda o, basis=basis: _maxabs(sum(o[n] for n in basis) - np.eye(o[basis[0]].shape[0]))))
    else:
        for n in ops:
            rels.append(Relation(f"{n} squares to identity", lambda o, n=n: _maxabs(o[n] @ o[n] - np.eye(o[n].shape[0]))))
        for basis in ds.bases:
            for a, b in itertools.combinations(basis, 2):
                rels.append(Relation(f"{a} commutes with {b}", lambda o, a=a, b=b: _maxabs(o[a] @ o[b] - o[b] @ o[a])))
    return rels


def verify_projector_dataset(ds: ProjectorSet, tol: float = RELATION_TOL) -> DatasetReport:
    checks = []
    for rel in _structural_relations(ds) + list(ds.relations):
        dev = float(rel.deviation(ds.operators))
        checks.append(RelationCheck(rel.name, dev, dev <= tol))
    return DatasetReport(ds.name, tuple(checks))


def _from_vectors(vectors: Mapping) -> dict:
    return {n: projector(v) for n, v in vectors.items()}


def _orthogonal_pairs(vectors: Mapping, tol: float = 1e-12) -> tuple:
    names = list(vectors)
    out = []
    for a, b in itertools.combinations(names, 2):
        va = np.asarray(vectors[a], dtype=complex)
        vb = np.asarray(vectors[b], dtype=complex)
        if abs(np.vdot(va, vb)) <= tol * np.linalg.norm(va) * np.linalg.norm(vb):
            out.append((a, b))
    return tuple(out)


# -- Spekkens' six qubit states ------------------------------------------------

def spekkens6() -> ProjectorSet:
    r3 = math.sqrt(3) / 2
    vectors = {
        "phi": ket(1, 0),
        "Phi": ket(0, 1),
        "chi": ket(0.5, r3),
        "X": ket(r3, -0.5),
        "psi": ket(0.5, -r3),
        "Psi": ket(r3, 0.5),
    }
    ops = _from_vectors(vectors)
    pairs = (("phi", "Phi"), ("chi", "X"), ("psi", "Psi"))
    rels = [Relation(f"{a} + {b} = 1", lambda o, a=a, b=b: _maxabs(o[a] + o[b] - I2)) for a, b in pairs]
    rels.append(Relation("phi + chi + psi = (3/2) 1", lambda o: _maxabs(o["phi"] + o["chi"] + o["psi"] - 1.5 * I2)))
    rels.append(Relation("Phi + X + Psi = (3/2) 1", lambda o: _maxabs(o["Phi"] + o["X"] + o["Psi"] - 1.5 * I2)))
    return ProjectorSet("spekkens6", "projectors", ops, vectors, pairs, pairs, tuple(rels))


# -- Yu-Oh 13 vectors -------------------------------------------------------------

YU_OH_VECTORS = {
    "z1": (1, 0, 0),
    "z2": (0, 1, 0),
    "z3": (0, 0, 1),
    "h0": (1, 1, 1),
    "h1": (-1, 1, 1),
    "h2": (1, -1, 1),
    "h3": (1, 1, -1),
    "y1+": (0, 1, 1),
    "y1-": (0, 1, -1),
    "y2+": (1, 0, 1),
    "y2-": (-1, 0, 1),
    "y3+": (1, 1, 0),
    "y3-": (1, -1, 0),
}
YU_OH_BASES = (("z1", "z2", "z3"), ("z1", "y1+", "y1-"), ("z2", "y2+", "y2-"), ("z3", "y3+", "y3-"))
YU_OH_H = ("h0", "h1", "h2", "h3")


def yuoh13() -> ProjectorSet:
    vectors = {n: ket(*v) for n, v in YU_OH_VECTORS.items()}
    ops = _from_vectors(vectors)
    rels = [Relation("h0 + h1 + h2 + h3 = (4/3) 1", lambda o: _maxabs(sum(o[h] for h in YU_OH_H) - (4 / 3) * np.eye(3)))]
    return ProjectorSet("yuoh13", "projectors", ops, vectors, _orthogonal_pairs(vectors), YU_OH_BASES, tuple(rels), YU_OH_H)


# -- Peres-Mermin square ----------------------------------------------------------

PM_ROWS = (("A11", "A12", "A13"), ("A21", "A22", "A23"), ("A31", "A32", "A33"))
PM_COLUMNS = tuple(tuple(r[j] for r in PM_ROWS) for j in range(3))
PM_SIGNS = {PM_ROWS[0]: 1, PM_ROWS[1]: 1, PM_ROWS[2]: 1, PM_COLUMNS[0]: 1, PM_COLUMNS[1]: 1, PM_COLUMNS[2]: -1}


def peres_mermin_operators() -> dict:
    return {
        "A11": np.kron(SIGMA_Z, I2),
        "A12": np.kron(I2, SIGMA_Z),
        "A13": np.kron(SIGMA_Z, SIGMA_Z),
        "A21": np.kron(I2, SIGMA_X),
        "A22": np.kron(SIGMA_X, I2),
        "A23": np.kron(SIGMA_X, SIGMA_X),
        "A31": np.kron(SIGMA_Z, SIGMA_X),
        "A32": np.kron(SIGMA_X, SIGMA_Z),
        "A33": np.kron(SIGMA_Y, SIGMA_Y),
    }


def peresmermin() -> ProjectorSet:
    ops = peres_mermin_operators()
    rels = []
    for line, sign in PM_SIGNS.items():
        rels.append(Relation(
            f"{'*'.join(line)} = {sign:+d} 1",
            lambda o, line=line, sign=sign: _maxabs(o[line[0]] @ o[line[1]] @ o[line[2]] - sign * np.eye(4)),
        ))
    return ProjectorSet("peresmermin", "observables", ops, {}, (), PM_ROWS + PM_COLUMNS, tuple(rels))


def peres_mermin_inequality() -> BooleInequality:
    coeffs = {line: sign for line, sign in PM_SIGNS.items()}
    return BooleInequality.make(coeffs, 4, label="I_PM")


# -- Cabello-Estebaranz-Garcia-Alcaine 18 vectors in dimension 4 ------------------
# A_ij is the vector shared by bases i and j (1-based); the bases are the nine
# commuting quadruples of the 18-observable inequality.

CEG18_VECTORS = {
    "A12": (0, 0, 0, 1),
    "A16": (1, 1, 0, 0),
    "A17": (1, -1, 0, 0),
    "A18": (0, 0, 1, 0),
    "A23": (1, 0, 1, 0),
    "A28": (0, 1, 0, 0),
    "A29": (1, 0, -1, 0),
    "A34": (-1, 1, 1, 1),
    "A37": (1, 1, -1, 1),
    "A39": (0, 1, 0, -1),
    "A45": (0, 1, -1, 0),
    "A47": (1, 1, 1, -1),
    "A48": (1, 0, 0, 1),
    "A56": (1, -1, -1, 1),
    "A58": (1, 0, 0, -1),
    "A59": (1, 1, 1, 1),
    "A67": (0, 0, 1, 1),
    "A69": (1, -1, 1, -1),
}
CEG18_BASES = (
    ("A12", "A16", "A17", "A18"),
    ("A12", "A23", "A28", "A29"),
    ("A23", "A34", "A37", "A39"),
    ("A34", "A45", "A47", "A48"),
    ("A45", "A56", "A58", "A59"),
    ("A16", "A56", "A67", "A69"),
    ("A17", "A37", "A47", "A67"),
    ("A18", "A28", "A48", "A58"),
    ("A29", "A39", "A59", "A69"),
)


def ceg18() -> ProjectorSet:
    vectors = {n: ket(*v) for n, v in CEG18_VECTORS.items()}
    ops = _from_vectors(vectors)
    rels = []
    for n in vectors:
        rels.append(Relation(
            f"{n} lies in exactly two bases",
            lambda o, n=n: float(abs(sum(n in b for b in CEG18_BASES) - 2)),
        ))
    rels.append(Relation("eighteen distinct rays", lambda o: float(abs(_distinct_rays(vectors) - 18))))
    return ProjectorSet("ceg18", "projectors", ops, vectors, _orthogonal_pairs(vectors), CEG18_BASES, tuple(rels))


def _distinct_rays(vectors: Mapping) -> int:
    vs = [np.asarray(v, dtype=complex) for v in vectors.values()]
    count = 0
    for i, v in enumerate(vs):
        if all(abs(abs(np.vdot(v, w)) - 1) > 1e-9 for w in vs[:i]):
            count += 1
    return count


def ceg18_observables() -> dict:
    """A_ij = 2 v_ij - 1."""
    return {n: 2 * P - np.eye(4) for n, P in ceg18().operators.items()}


def ceg18_inequality() -> BooleInequality:
    return BooleInequality.make({b: -1 for b in CEG18_BASES}, 7, label="I_18")


# -- Yu-Oh Boole inequality ------------------------------------------------------
# Observables Z_k = 1 - 2 z_k, Y_k^+- = 1 - 2 y_k^+-, H_i = 1 - 2 h_i, named by the
# projector labels.  Every two-observable context enters the C_2 sum twice
# (once per ordering); with that reading the operator is (25 + 8/3) 1 and the
# noncontextual maximum is 25.

def yu_oh_observables() -> dict:
    return {n: np.eye(3) - 2 * P for n, P in yuoh13().operators.items()}


def yu_oh_inequality() -> BooleInequality:
    coeffs: dict = {}

    def add(ctx, v):
        key = tuple(ctx)
        coeffs[key] = coeffs.get(key, 0) + v

    add(("h0",), 2)
    for i in (1, 2, 3):
        add((f"z{i}",), 1)
        add((f"y{i}+",), 1)
        add((f"y{i}-",), 1)
        add((f"h{i}",), 2)
    for j in (1, 2, 3):
        add((f"z{j}", f"y{j}+"), 1)
        add((f"y{j}+", f"y{j}-"), 1)
        add((f"y{j}-", f"z{j}"), 1)
    for k in (1, 2, 3):
        add((f"z{k}", f"y{k}+", f"y{k}-"), -3)
    for a, b in yu_oh_two_contexts():
        add((a, b), -2)
    canon: dict = {}
    for ctx, v in coeffs.items():
        c = canonical_context(ctx)
        canon[c] = canon.get(c, 0) + v
    return BooleInequality.make(canon, 25, label="I_YO")


def yu_oh_two_contexts() -> tuple:
    """The 24 orthogonal pairs, i.e. the two-observable contexts."""
    return _orthogonal_pairs({n: ket(*v) for n, v in YU_OH_VECTORS.items()})


def yu_oh_contexts() -> list:
    triples = [list(b) for b in YU_OH_BASES]
    pairs = [list(p) for p in yu_oh_two_contexts()]
    return triples + pairs


# -- PBR measurement for |0>, |+> ------------------------------------------------

def pbr() -> ProjectorSet:
    zero, one = ket(1, 0), ket(0, 1)
    plus, minus = ket(1, 1), ket(1, -1)
    states = {0: (zero, one), 1: (plus, minus)}  # (phi_i, phi_i^perp)
    vectors = {}
    for i, j in itertools.product((0, 1), repeat=2):
        a, a_perp = states[i]
        b, b_perp = states[j]
        vectors[f"E{i}{j}"] = (np.kron(a, b_perp) + np.kron(a_perp, b)) / math.sqrt(2)
    ops = _from_vectors(vectors)
    names = list(vectors)
    rels = [Relation("E00 + E01 + E10 + E11 = 1", lambda o: _maxabs(sum(o[n] for n in names) - np.eye(4)))]
    for i, j in itertools.product((0, 1), repeat=2):
        prod = np.kron(states[i][0], states[j][0])
        rels.append(Relation(
            f"<phi{i} phi{j}|E{i}{j}> = 0",
            lambda o, prod=prod, n=f"E{i}{j}": float(abs(np.vdot(prod, o[n] @ prod))),
        ))
    return ProjectorSet("pbr", "projectors", ops, vectors, _orthogonal_pairs(vectors), (tuple(names),), tuple(rels))


DATASETS = {
    "spekkens6": spekkens6,
    "yuoh13": yuoh13,
    "peresmermin": peresmermin,
    "ceg18": ceg18,
    "pbr": pbr,
}


def load_dataset(name: str) -> ProjectorSet:
    try:
        return DATASETS[name]()
    except KeyError:
        raise KeyError(f"unknown dataset {name!r}; choose from {sorted(DATASETS)}") from None
