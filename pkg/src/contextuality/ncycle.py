"""The n-cycle scenario: Boole inequalities, no-disturbance vertices, quantum bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .polytope import BooleInequality, PolytopeV
from .quantum import SIGMA_X, SIGMA_Z, commute, realize_model
from .scenario import MarginalModel, MarginalScenario, canonical_context, validate_scenario

MIN_N, MAX_N = 2, 16


def _check_n(n: int, low: int = MIN_N) -> None:
    if not isinstance(n, (int, np.integer)) or n < low or n > MAX_N:
        raise ValueError(f"n must be an integer in [{low}, {MAX_N}], got {n!r}")


def names(n: int) -> list[str]:
    return [f"X{i}" for i in range(n)]


def cycle_pairs(n: int) -> list[tuple[str, str]]:
    """The pairs (X_i, X_{i+1 mod n}) in cycle order (one pair when n = 2)."""
    obs = names(n)
    count = 1 if n == 2 else n
    return [(obs[i], obs[(i + 1) % n]) for i in range(count)]


def ncycle_scenario(n: int) -> MarginalScenario:
    _check_n(n)
    return validate_scenario([list(p) for p in cycle_pairs(n)])


def gamma_from_label(n: int, label: int) -> tuple[int, ...]:
    """Sign vector whose -1 entries sit at the set bits of ``label``."""
    return tuple(-1 if (label >> i) & 1 else 1 for i in range(n))


def label_from_gamma(gamma) -> int:
    return sum(1 << i for i, g in enumerate(gamma) if g == -1)


def odd_negative_gammas(n: int) -> list[tuple[int, ...]]:
    return [gamma_from_label(n, k) for k in range(1 << n) if bin(k).count("1") % 2 == 1]


def correlation_inequality(n: int, gamma, bound) -> BooleInequality:
    coeffs = {canonical_context(p): g for p, g in zip(cycle_pairs(n), gamma)}
    return BooleInequality.make(coeffs, bound, label=f"gamma{label_from_gamma(gamma)}", normalize=False)


def boole_inequalities(n: int) -> list[BooleInequality]:
    """sum_i gamma_i <X_i X_{i+1}> <= n - 2 for every gamma with an odd number of -1 entries."""
    _check_n(n, 3)
    return [correlation_inequality(n, g, n - 2) for g in odd_negative_gammas(n)]


def nd_vertices(n: int) -> PolytopeV:
    """Vertices of the no-disturbance polytope, written down directly.

    Deterministic points come from the 2^n global assignments; the 2^(n-1)
    contextual ones have zero marginals and an odd-negative correlation part.
    """
    _check_n(n, 3)
    scenario = ncycle_scenario(n)
    pairs = cycle_pairs(n)
    verts = []
    for k in range(1 << n):
        a = [-1 if (k >> (n - 1 - i)) & 1 else 1 for i in range(n)]
        vals = {(f"X{i}",): a[i] for i in range(n)}
        for i, p in enumerate(pairs):
            vals[canonical_context(p)] = a[i] * a[(i + 1) % n]
        verts.append(tuple(vals[c] for c in scenario.contexts))
    for g in odd_negative_gammas(n):
        vals = {(f"X{i}",): 0 for i in range(n)}
        for i, p in enumerate(pairs):
            vals[canonical_context(p)] = g[i]
        verts.append(tuple(vals[c] for c in scenario.contexts))
    return PolytopeV(scenario.contexts, tuple(verts))


def correlation_part(scenario: MarginalScenario, point) -> tuple:
    """Entries of a point on the cycle pairs, in cycle order."""
    n = len(scenario.observables)
    return tuple(point[scenario.index(p)] for p in cycle_pairs(n))


def quantum_bound_closed_form(n: int) -> float:
    _check_n(n)
    c = math.cos(math.pi / n)
    if n % 2:
        return n * (4 * c / (1 + c) - 1)
    return n * c


@dataclass(frozen=True)
class NCycleRealization:
    n: int
    state: np.ndarray
    observables: tuple
    gamma: tuple

    @property
    def named_observables(self) -> dict:
        return {f"X{i}": A for i, A in enumerate(self.observables)}

    @property
    def inequality(self) -> BooleInequality:
        return correlation_inequality(self.n, self.gamma, self.n - 2)

    @property
    def dimension(self) -> int:
        return self.state.shape[0]

    def model(self) -> MarginalModel:
        return realize_model(self.state, self.named_observables, ncycle_scenario(self.n))

    def value(self) -> float:
        """sum_i gamma_i <X_i X_{i+1}> on the realization's state."""
        total = 0.0
        obs = self.observables
        for i in range(self.n):
            prod = obs[i] @ obs[(i + 1) % self.n]
            total += self.gamma[i] * float(np.trace(self.state @ prod).real)
        return total


def quantum_realization(n: int) -> NCycleRealization:
    """Qutrit construction for odd n, two-qubit singlet construction for even n."""
    _check_n(n, 3)
    if n % 2:
        c = math.cos(math.pi / n)
        cos2 = c / (1 + c)
        ct, st = math.sqrt(cos2), math.sqrt(1 - cos2)
        obs = []
        for k in range(n):
            phi = (n - 1) / n * math.pi * k
            v = np.array([ct, st * math.cos(phi), st * math.sin(phi)])
            if abs(np.linalg.norm(v) - 1) > 1e-12:
                raise AssertionError("odd-cycle vector is not unit")
            obs.append(2 * np.outer(v, v).astype(complex) - np.eye(3))
        state = np.zeros((3, 3), dtype=complex)
        state[0, 0] = 1
        gamma = (-1,) * n
    else:
        eye = np.eye(2)
        obs = []
        for k in range(n):
            tilde = math.cos(k * math.pi / n) * SIGMA_X + math.sin(k * math.pi / n) * SIGMA_Z
            obs.append(np.kron(tilde, eye) if k % 2 == 0 else np.kron(eye, tilde))
        singlet = np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)
        state = np.outer(singlet, singlet.conj())
        gamma = (-1,) * (n - 1) + (1,)
    for i in range(n):
        if not commute(obs[i], obs[(i + 1) % n]):
            raise AssertionError(f"adjacent observables {i}, {(i + 1) % n} do not commute")
    return NCycleRealization(n, state, tuple(obs), gamma)
