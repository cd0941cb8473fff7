"""Marginal scenarios, marginal models and the expectation representation.

Observables are dichotomic with outcomes +1 and -1.  An outcome tuple of a
context with ``m`` observables is encoded as an ``m``-bit integer: bit value 0
stands for +1, bit value 1 for -1, and the context's first observable is the
most significant bit.  With this encoding the Hadamard matrix maps a
probability vector to the vector of correlators, whose ``k``-th entry is the
expectation of the product of the observables selected by the bits of ``k``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

MAX_OBSERVABLES = 20
MAX_CONTEXT_SIZE = 8
MAX_HADAMARD = 20

FLOAT_TOL = 1e-12

Number = Union[Fraction, float]
Context = tuple  # tuple[str, ...] in canonical order

_NAME_RE = re.compile(r"^[A-Za-z0-9_+\-.']+$")
_DIGITS = re.compile(r"(\d+)")


class ScenarioError(ValueError):
    """Malformed scenario, model or expectation data."""


class PositivityError(ScenarioError):
    """An expectation vector reconstructs to a negative probability."""

    def __init__(self, context, outcome, value, formula):
        self.context = context
        self.outcome = outcome
        self.value = value
        self.formula = formula
        super().__init__(f"positivity violated: {formula} = {value} < 0")


def name_key(name: str):
    """Sort key for observable names.

    Runs of digits compare numerically so that ``X2`` sorts before ``X10``;
    for names with single-digit indices this is plain lexicographic order.
    """
    return tuple(int(p) if p.isdigit() else p for p in _DIGITS.split(name))


def context_key(context: Sequence[str]):
    return (len(context), tuple(name_key(n) for n in context))


def canonical_context(names: Iterable[str]) -> Context:
    return tuple(sorted(names, key=name_key))


def outcome_string(bits: int, m: int) -> str:
    return "".join("-" if (bits >> (m - 1 - i)) & 1 else "+" for i in range(m))


def parse_outcome(text: str) -> int:
    bits = 0
    for ch in text:
        if ch not in "+-":
            raise ScenarioError(f"bad outcome string {text!r}")
        bits = (bits << 1) | (ch == "-")
    return bits


@dataclass(frozen=True)
class Observable:
    name: str
    outcomes: tuple = (1, -1)


@dataclass(frozen=True)
class MarginalScenario:
    """Observables plus a downward-closed family of contexts, canonically ordered."""

    observables: tuple
    contexts: tuple
    _index: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {c: i for i, c in enumerate(self.contexts)})

    def index(self, context: Sequence[str]) -> int:
        try:
            return self._index[canonical_context(context)]
        except KeyError:
            raise ScenarioError(f"{context!r} is not a context of this scenario") from None

    def __contains__(self, context) -> bool:
        return canonical_context(context) in self._index

    @property
    def dimension(self) -> int:
        return len(self.contexts)

    @property
    def maximal_contexts(self) -> tuple:
        maximal = []
        for c in self.contexts:
            s = set(c)
            if not any(len(d) > len(c) and s <= set(d) for d in self.contexts):
                maximal.append(c)
        return tuple(maximal)

    def observable_objects(self) -> tuple:
        return tuple(Observable(n) for n in self.observables)

    def to_json(self) -> dict:
        return {"observables": list(self.observables), "contexts": [list(c) for c in self.contexts]}


def validate_scenario(contexts: Sequence[Sequence[str]], observables: Sequence[str] | None = None) -> MarginalScenario:
    """Return the downward closure of ``contexts`` as a canonical scenario.

    ``observables`` optionally declares the observable list; every context
    member must then be declared, and declared observables that appear in no
    context still get their singleton.
    """
    if not contexts and not observables:
        raise ScenarioError("empty context list")
    declared = None
    if observables is not None:
        declared = list(observables)
        dupes = {n for n in declared if declared.count(n) > 1}
        if dupes:
            raise ScenarioError(f"duplicate observable names: {sorted(dupes)}")
        for n in declared:
            _check_name(n)
    closed = set()
    names = set(declared or ())
    for ctx in contexts:
        ctx = list(ctx)
        if not ctx:
            continue
        for n in ctx:
            _check_name(n)
        if len(set(ctx)) != len(ctx):
            raise ScenarioError(f"duplicate observable names in context {ctx}")
        if len(ctx) > MAX_CONTEXT_SIZE:
            raise ScenarioError(f"context {ctx} exceeds {MAX_CONTEXT_SIZE} observables")
        if declared is not None and not set(ctx) <= set(declared):
            raise ScenarioError(f"context {ctx} uses undeclared observables")
        names.update(ctx)
        for r in range(1, len(ctx) + 1):
            for sub in itertools.combinations(ctx, r):
                closed.add(canonical_context(sub))
    if not names:
        raise ScenarioError("empty context list")
    if len(names) > MAX_OBSERVABLES:
        raise ScenarioError(f"{len(names)} observables exceed the cap of {MAX_OBSERVABLES}")
    for n in names:
        closed.add((n,))
    ordered_names = tuple(sorted(names, key=name_key))
    ordered_contexts = tuple(sorted(closed, key=context_key))
    return MarginalScenario(ordered_names, ordered_contexts)


def _check_name(name) -> None:
    if not isinstance(name, str) or not _NAME_RE.match(name):
        raise ScenarioError(f"malformed observable name {name!r}")


def hadamard_matrix(m: int) -> np.ndarray:
    """Sylvester Hadamard matrix of order 2**m, built as H_1 (x) H_{m-1}."""
    if m < 1 or m > MAX_HADAMARD:
        raise ScenarioError(f"Hadamard order must satisfy 1 <= m <= {MAX_HADAMARD}, got {m}")
    h1 = np.array([[1, 1], [1, -1]], dtype=np.int64)
    h = h1
    for _ in range(m - 1):
        h = np.kron(h1, h)
    return h


def _hadamard_apply(vec: Sequence, m: int) -> list:
    """Exact fast Walsh-Hadamard transform (same result as hadamard_matrix(m) @ vec)."""
    out = list(vec)
    step = 1
    while step < len(out):
        for start in range(0, len(out), 2 * step):
            for i in range(start, start + step):
                a, b = out[i], out[i + step]
                out[i], out[i + step] = a + b, a - b
        step *= 2
    return out


def _is_exact(x) -> bool:
    return isinstance(x, (Fraction, int)) and not isinstance(x, bool)


def _uniform_numbers(values: Iterable, what: str) -> tuple[list, bool]:
    """Coerce to all-Fraction or all-float; integers follow the other entries."""
    values = list(values)
    has_float = any(isinstance(v, float) for v in values)
    has_frac = any(isinstance(v, Fraction) for v in values)
    if has_float and has_frac:
        raise ScenarioError(f"{what} mixes exact rationals with decimals")
    if has_float:
        return [float(v) for v in values], False
    return [Fraction(v) for v in values], True


@dataclass(frozen=True)
class MarginalModel:
    """Probability tables on every context of a scenario.

    ``tables`` maps each canonical context to a tuple of ``2**m`` entries
    indexed by the outcome encoding described in the module docstring.
    """

    scenario: MarginalScenario
    tables: Mapping
    exact: bool

    def probability(self, context: Sequence[str], outcome: str | int) -> Number:
        ctx = canonical_context(context)
        if isinstance(outcome, str):
            outcome = parse_outcome(outcome)
        return self.tables[ctx][outcome]

    def to_json(self) -> dict:
        out = {}
        for ctx in self.scenario.contexts:
            m = len(ctx)
            out[",".join(ctx)] = {outcome_string(k, m): _num_json(v) for k, v in enumerate(self.tables[ctx])}
        return {"scenario": self.scenario.to_json(), "tables": out}


@dataclass(frozen=True)
class ExpectationVector:
    scenario: MarginalScenario
    entries: tuple
    exact: bool

    def __getitem__(self, context) -> Number:
        return self.entries[self.scenario.index(context)]

    def as_dict(self) -> dict:
        return dict(zip(self.scenario.contexts, self.entries))

    def rationalized(self) -> "ExpectationVector":
        return ExpectationVector(self.scenario, tuple(Fraction(x) for x in self.entries), True)

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario.to_json(),
            "expectations": {",".join(c): _num_json(v) for c, v in zip(self.scenario.contexts, self.entries)},
        }


def _num_json(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else str(x.numerator)
    return float(x)


def marginalize(table: Sequence, context: Context, sub: Context) -> list:
    """Sum a context table down to the outcomes of ``sub`` (a subset of ``context``)."""
    m = len(context)
    pos = [context.index(n) for n in sub]
    out = [0] * (1 << len(sub))
    for k, p in enumerate(table):
        j = 0
        for q in pos:
            j = (j << 1) | ((k >> (m - 1 - q)) & 1)
        out[j] = out[j] + p
    return out


@dataclass(frozen=True)
class DisturbanceViolation:
    shared: tuple
    context_a: tuple
    context_b: tuple
    outcome: str
    value_a: Number
    value_b: Number


@dataclass(frozen=True)
class NoDisturbanceReport:
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


def check_no_disturbance(tables: Mapping, tol: float = FLOAT_TOL) -> NoDisturbanceReport:
    """Compare marginals on the shared observables of every pair of tables.

    Exact comparison when all entries are rational, ``tol`` otherwise.  Nested
    contexts are the special case where the shared set is the smaller context.
    """
    items = [(canonical_context(c), list(t)) for c, t in _normalize_table_keys(tables).items()]
    exact = all(_is_exact(v) for _, t in items for v in t)
    violations = []
    for (ca, ta), (cb, tb) in itertools.combinations(items, 2):
        shared = canonical_context(set(ca) & set(cb))
        if not shared:
            continue
        ma = marginalize(ta, ca, shared)
        mb = marginalize(tb, cb, shared)
        for k, (x, y) in enumerate(zip(ma, mb)):
            bad = x != y if exact else abs(float(x) - float(y)) > tol
            if bad:
                violations.append(DisturbanceViolation(shared, ca, cb, outcome_string(k, len(shared)), x, y))
    return NoDisturbanceReport(tuple(violations))


def _normalize_table_keys(tables: Mapping) -> dict:
    out = {}
    for c, t in tables.items():
        if isinstance(c, str):
            c = tuple(c.split(","))
        out[canonical_context(c)] = t
    return out


def make_model(scenario: MarginalScenario, tables: Mapping, tol: float = FLOAT_TOL) -> MarginalModel:
    """Build a validated model from tables given on some contexts.

    ``tables`` maps contexts (tuples or comma-joined keys) to either a full
    sequence of ``2**m`` probabilities or a map from outcome strings such as
    ``"+-"`` to probabilities (missing outcomes count as zero).  Contexts not
    listed are filled in by marginalizing a listed superset.
    """
    raw = {}
    for c, t in _normalize_table_keys(tables).items():
        if c not in scenario:
            raise ScenarioError(f"table for {c} which is not a context")
        m = len(c)
        if isinstance(t, Mapping):
            vec = [0] * (1 << m)
            for key, val in t.items():
                if len(key) != m:
                    raise ScenarioError(f"outcome {key!r} has wrong length for context {c}")
                vec[parse_outcome(key)] = val
        else:
            vec = list(t)
            if len(vec) != 1 << m:
                raise ScenarioError(f"table for {c} must have {1 << m} entries")
        raw[c] = vec
    flat, exact = _uniform_numbers([v for t in raw.values() for v in t], "model")
    it = iter(flat)
    raw = {c: [next(it) for _ in t] for c, t in raw.items()}
    for c, t in raw.items():
        if any(p < (0 if exact else -tol) for p in t):
            raise ScenarioError(f"negative probability in table {c}")
        total = sum(t)
        if (total != 1) if exact else abs(total - 1) > tol:
            raise ScenarioError(f"table {c} sums to {total}, not 1")
    report = check_no_disturbance(raw, tol)
    if not report.ok:
        v = report.violations[0]
        raise ScenarioError(
            f"no-disturbance violated on {','.join(v.shared)} outcome {v.outcome}: "
            f"{v.value_a} from {','.join(v.context_a)} vs {v.value_b} from {','.join(v.context_b)}"
        )
    full = {}
    for c in scenario.contexts:
        if c in raw:
            full[c] = tuple(raw[c])
            continue
        sup = next((d for d in raw if set(c) <= set(d)), None)
        if sup is None:
            raise ScenarioError(f"no table covers context {','.join(c)}")
        full[c] = tuple(marginalize(raw[sup], sup, c))
    return MarginalModel(scenario, full, exact)


def _subset_index(context: Context, sub: Sequence[str]) -> int:
    m = len(context)
    k = 0
    for n in sub:
        k |= 1 << (m - 1 - context.index(n))
    return k


def probs_to_expectations(model: MarginalModel) -> ExpectationVector:
    """Correlators of every context, read off the Hadamard transform of maximal tables."""
    scenario = model.scenario
    values = {}
    for ctx in scenario.maximal_contexts:
        corr = _hadamard_apply(model.tables[ctx], len(ctx))
        for r in range(1, len(ctx) + 1):
            for sub in itertools.combinations(ctx, r):
                values.setdefault(sub, corr[_subset_index(ctx, sub)])
    entries = tuple(values[c] for c in scenario.contexts)
    return ExpectationVector(scenario, entries, model.exact)


def _positivity_formula(ctx: Context, outcome: int, e: Mapping) -> str:
    m = len(ctx)
    terms = ["1"]
    for r in range(1, m + 1):
        for sub in itertools.combinations(ctx, r):
            sign = 1
            for n in sub:
                if (outcome >> (m - 1 - ctx.index(n))) & 1:
                    sign = -sign
            terms.append(("+ " if sign > 0 else "- ") + "<" + "".join(sub) + ">")
    label = ",".join("+" if ch == "+" else "-" for ch in outcome_string(outcome, m))
    return f"{1 << m}p({label}|{','.join(ctx)}) = " + " ".join(terms)


def expectations_to_probs(vec: ExpectationVector, tol: float = FLOAT_TOL) -> MarginalModel:
    """Invert the Hadamard transform context by context.

    Raises PositivityError naming the first negative reconstructed
    probability together with the correlator combination that produced it.
    """
    scenario = vec.scenario
    values = dict(zip(scenario.contexts, vec.entries))
    tables = {}
    for ctx in scenario.contexts:
        m = len(ctx)
        corr = [1] * (1 << m)
        for k in range(1, 1 << m):
            sub = tuple(n for i, n in enumerate(ctx) if (k >> (m - 1 - i)) & 1)
            corr[k] = values[sub]
        scaled = _hadamard_apply(corr, m)
        for k, s in enumerate(scaled):
            if s < (0 if vec.exact else -tol * (1 << m)):
                raise PositivityError(ctx, outcome_string(k, m), s, _positivity_formula(ctx, k, values))
        if vec.exact:
            table = tuple(Fraction(s) / (1 << m) for s in scaled)
        else:
            table = tuple(max(float(s) / (1 << m), 0.0) for s in scaled)
        tables[ctx] = table
    return MarginalModel(scenario, tables, vec.exact)


def make_expectations(scenario: MarginalScenario, values: Mapping) -> ExpectationVector:
    """Expectation vector from a map context -> value (every context required)."""
    norm = _normalize_table_keys(values)
    missing = [c for c in scenario.contexts if c not in norm]
    if missing:
        raise ScenarioError(f"missing expectation for {','.join(missing[0])}")
    extra = [c for c in norm if c not in scenario]
    if extra:
        raise ScenarioError(f"expectation for unknown context {','.join(extra[0])}")
    entries, exact = _uniform_numbers([norm[c] for c in scenario.contexts], "expectation vector")
    for c, v in zip(scenario.contexts, entries):
        if abs(v) > 1 + (0 if exact else FLOAT_TOL):
            raise ScenarioError(f"expectation of {','.join(c)} is {v}, outside [-1, 1]")
    return ExpectationVector(scenario, tuple(entries), exact)


# -- file formats -----------------------------------------------------------

def parse_number(x) -> Number | int:
    """JSON number or string; strings containing '/' are exact rationals."""
    if isinstance(x, bool):
        raise ScenarioError(f"not a number: {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        s = x.strip()
        try:
            if "/" in s:
                return Fraction(s)
            if re.fullmatch(r"[+-]?\d+", s):
                return int(s)
            return float(s)
        except (ValueError, ZeroDivisionError):
            pass
    raise ScenarioError(f"not a number: {x!r}")


def scenario_from_json(obj) -> MarginalScenario:
    if not isinstance(obj, Mapping) or "contexts" not in obj:
        raise ScenarioError("scenario object needs a 'contexts' list")
    return validate_scenario(obj["contexts"], obj.get("observables"))


def model_from_json(obj, scenario: MarginalScenario | None = None) -> MarginalModel:
    if scenario is None:
        scenario = scenario_from_json(obj["scenario"])
    tables = {}
    for key, table in obj["tables"].items():
        if isinstance(table, Mapping):
            tables[key] = {o: parse_number(v) for o, v in table.items()}
        else:
            tables[key] = [parse_number(v) for v in table]
    return make_model(scenario, tables)


def expectations_from_json(obj, scenario: MarginalScenario | None = None) -> ExpectationVector:
    if scenario is None:
        scenario = scenario_from_json(obj["scenario"])
    return make_expectations(scenario, {k: parse_number(v) for k, v in obj["expectations"].items()})
