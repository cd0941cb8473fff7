"""Dense finite-dimensional quantum mechanics: states, observables, Born rule.

Operators are plain complex numpy arrays; the ``as_*`` helpers validate them
at module boundaries.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .linalg import hermitian_eigvalsh
from .polytope import BooleInequality
from .scenario import MarginalModel, MarginalScenario, make_model

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
TRACE_TOL = 1e-12
DICHOTOMIC_TOL = 1e-10
COMMUTE_TOL = 1e-10
MAX_DIMENSION = 64

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


class QuantumError(ValueError):
    pass


def _square(M) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise QuantumError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] > MAX_DIMENSION:
        raise QuantumError(f"dimension {M.shape[0]} exceeds {MAX_DIMENSION}")
    return M


def as_hermitian(M, tol: float = HERMITIAN_TOL) -> np.ndarray:
    M = _square(M)
    if np.max(np.abs(M - M.conj().T), initial=0.0) > tol:
        raise QuantumError("matrix is not Hermitian")
    return M


def ket(*amplitudes) -> np.ndarray:
    v = np.asarray(amplitudes, dtype=complex).ravel()
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise QuantumError("zero vector")
    return v / nrm


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def as_density(state) -> np.ndarray:
    """Density matrix from a ket (1-d) or a matrix, validated."""
    s = np.asarray(state, dtype=complex)
    if s.ndim == 1:
        nrm = np.linalg.norm(s)
        if abs(nrm - 1) > 1e-9:
            raise QuantumError(f"ket has norm {nrm}, expected 1")
        return np.outer(s, s.conj())
    rho = as_hermitian(s)
    tr = np.trace(rho).real
    if abs(tr - 1) > TRACE_TOL:
        raise QuantumError(f"trace {tr} differs from 1")
    if hermitian_eigvalsh(rho)[0] < -PSD_TOL:
        raise QuantumError("state is not positive semidefinite")
    return rho


def as_dichotomic(A) -> np.ndarray:
    A = as_hermitian(A)
    if np.max(np.abs(A @ A - np.eye(A.shape[0]))) > DICHOTOMIC_TOL:
        raise QuantumError("observable does not square to the identity")
    return A


def is_projector(P, tol: float = 1e-10) -> bool:
    P = np.asarray(P, dtype=complex)
    return bool(np.max(np.abs(P - P.conj().T)) <= tol and np.max(np.abs(P @ P - P)) <= tol)


def bloch_density(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return 0.5 * (np.eye(2) + r[0] * SIGMA_X + r[1] * SIGMA_Y + r[2] * SIGMA_Z)


def density_bloch(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    return np.array([np.trace(rho @ s).real for s in PAULIS])


def born(rho, effect) -> float:
    """tr(rho E) for an effect 0 <= E <= 1; tiny excursions outside [0,1] are clamped."""
    rho = as_density(rho)
    E = as_hermitian(effect)
    if E.shape != rho.shape:
        raise QuantumError("state and effect dimensions differ")
    w = hermitian_eigvalsh(E)
    if w[0] < -PSD_TOL or w[-1] > 1 + PSD_TOL:
        raise QuantumError("effect has eigenvalues outside [0, 1]")
    p = float(np.trace(rho @ E).real)
    if -1e-12 <= p < 0:
        p = 0.0
    elif 1 < p <= 1 + 1e-12:
        p = 1.0
    return p


def commute(A, B, tol: float = COMMUTE_TOL) -> bool:
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.shape != B.shape:
        raise QuantumError("dimension mismatch")
    return bool(np.max(np.abs(A @ B - B @ A), initial=0.0) <= tol)


def expectation(rho, A) -> float:
    return float(np.trace(np.asarray(rho) @ np.asarray(A)).real)


def operator_norm(A) -> float:
    """Largest absolute eigenvalue, from the Jacobi eigensolver."""
    w = hermitian_eigvalsh(as_hermitian(A, tol=1e-9))
    return float(max(abs(w[0]), abs(w[-1])))


def _check_context_commutes(context: Sequence[str], observables: Mapping) -> None:
    for a, b in itertools.combinations(context, 2):
        if not commute(observables[a], observables[b]):
            raise QuantumError(f"observables {a} and {b} share a context but do not commute")


def context_product(context: Sequence[str], observables: Mapping) -> np.ndarray:
    _check_context_commutes(context, observables)
    d = next(iter(observables.values())).shape[0]
    out = np.eye(d, dtype=complex)
    for n in context:
        out = out @ observables[n]
    return out


def realize_model(state, observables: Mapping, scenario: MarginalScenario) -> MarginalModel:
    """Marginal model of a state and commuting dichotomic observables on each context."""
    rho = as_density(state)
    obs = {}
    for n in scenario.observables:
        if n not in observables:
            raise QuantumError(f"no operator for observable {n}")
        A = as_dichotomic(observables[n])
        if A.shape != rho.shape:
            raise QuantumError(f"operator {n} has the wrong dimension")
        obs[n] = A
    d = rho.shape[0]
    eye = np.eye(d)
    proj = {n: ((eye + A) / 2, (eye - A) / 2) for n, A in obs.items()}
    tables = {}
    for ctx in scenario.maximal_contexts:
        _check_context_commutes(ctx, obs)
        m = len(ctx)
        table = []
        for k in range(1 << m):
            P = eye.astype(complex)
            for i, n in enumerate(ctx):
                P = P @ proj[n][(k >> (m - 1 - i)) & 1]
            p = float(np.trace(rho @ P).real)
            table.append(0.0 if -1e-15 < p < 0 else p)
        tables[ctx] = table
    return make_model(scenario, tables, tol=1e-12)


def inequality_operator(ineq: BooleInequality, observables: Mapping) -> np.ndarray:
    """sum of coefficient * (product of the context's observables)."""
    d = next(iter(observables.values())).shape[0]
    out = np.zeros((d, d), dtype=complex)
    for ctx, coef in ineq.coefficients:
        missing = [n for n in ctx if n not in observables]
        if missing:
            raise QuantumError(f"no operator for {missing}")
        out += float(coef) * context_product(ctx, observables)
    return out


def identity_deviation(M) -> tuple[float, float]:
    """(c, max |M - c 1|) with c the mean diagonal entry."""
    M = np.asarray(M, dtype=complex)
    c = float(np.trace(M).real) / M.shape[0]
    return c, float(np.max(np.abs(M - c * np.eye(M.shape[0]))))


@dataclass(frozen=True)
class StateIndependenceReport:
    min_eigenvalue: float
    max_eigenvalue: float
    nc_bound: float
    state_independent: bool
    proportional_to_identity: bool
    identity_multiple: float
    identity_deviation: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def state_independence_report(ineq: BooleInequality, observables: Mapping, nc_bound=None, tol: float = 1e-10) -> StateIndependenceReport:
    M = inequality_operator(ineq, observables)
    w = hermitian_eigvalsh(as_hermitian(M, tol=1e-9))
    bound = float(ineq.bound if nc_bound is None else nc_bound)
    c, dev = identity_deviation(M)
    return StateIndependenceReport(
        min_eigenvalue=float(w[0]),
        max_eigenvalue=float(w[-1]),
        nc_bound=bound,
        state_independent=bool(w[0] > bound + tol),
        proportional_to_identity=bool(dev <= tol),
        identity_multiple=c,
        identity_deviation=dev,
    )


def nc_maximum(ineq: BooleInequality, names: Sequence[str] | None = None, chunk_bits: int = 16) -> int:
    """Exact maximum of the inequality's left side over all +-1 assignments.

    Coefficients must be integers.  The assignment space is swept in blocks of
    2**chunk_bits with numpy; the block results are reduced by max, so the
    answer does not depend on the blocking.
    """
    if names is None:
        names = sorted({n for ctx in ineq.contexts() for n in ctx})
    names = list(names)
    pos = {n: i for i, n in enumerate(names)}
    k = len(names)
    terms = []
    for ctx, coef in ineq.coefficients:
        if coef.denominator != 1:
            raise ValueError("nc_maximum needs integer coefficients")
        terms.append(([pos[n] for n in ctx], int(coef)))
    low_bits = min(k, chunk_bits)
    low = np.arange(1 << low_bits, dtype=np.int64)
    low_signs = 1 - 2 * ((low[:, None] >> np.arange(low_bits)[None, :]) & 1)
    best = None
    for high in range(1 << (k - low_bits)):
        high_signs = 1 - 2 * ((high >> np.arange(k - low_bits)) & 1)
        signs = np.concatenate([low_signs, np.broadcast_to(high_signs, (len(low), k - low_bits))], axis=1)
        total = np.zeros(len(low), dtype=np.int64)
        for idx, coef in terms:
            total += coef * np.prod(signs[:, idx], axis=1)
        m = int(total.max())
        best = m if best is None else max(best, m)
    return best


def gleason_counterexample(n: int, psi_hat, phi_hat) -> float:
    """The qubit measure 1/2 (1 + cos(n arccos(phi.psi))) for odd n.

    For n = 1 this is the Born rule; for n >= 3 it is a normalized,
    additive-on-bases assignment that is not of Born form.
    """
    if n < 1 or n % 2 == 0:
        raise ValueError("n must be a positive odd integer")
    psi = np.asarray(psi_hat, dtype=float)
    phi = np.asarray(phi_hat, dtype=float)
    for v in (psi, phi):
        if abs(np.linalg.norm(v) - 1) > 1e-12:
            raise ValueError("Bloch vectors must be unit")
    c = float(np.clip(np.dot(psi, phi), -1.0, 1.0))
    return 0.5 * (1 + chebyshev_t(n, c))


def chebyshev_t(n: int, c: float) -> float:
    """T_n(c) = cos(n arccos c) by the three-term recursion.

    The recursion commutes with c -> -c bit for bit for odd n, so antipodal
    values sum to exactly 1 in the measure above; cos(n*acos(c)) does not.
    """
    t0, t1 = 1.0, c
    if n == 0:
        return t0
    for _ in range(n - 1):
        t0, t1 = t1, 2 * c * t1 - t0
    return t1


# -- file formats -----------------------------------------------------------

def matrix_from_json(obj) -> np.ndarray:
    d = int(obj["dimension"])
    entries = obj["entries"]
    if len(entries) != d * d:
        raise QuantumError(f"matrix needs {d * d} entries, got {len(entries)}")
    vals = [complex(e[0], e[1]) if isinstance(e, (list, tuple)) else complex(e) for e in entries]
    return np.array(vals, dtype=complex).reshape(d, d)


def matrix_to_json(M) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"dimension": M.shape[0], "entries": [[float(z.real), float(z.imag)] for z in M.ravel()]}


def state_from_json(obj) -> np.ndarray:
    if isinstance(obj, Mapping) and "ket" in obj:
        return np.array([complex(e[0], e[1]) if isinstance(e, (list, tuple)) else complex(e) for e in obj["ket"]])
    return matrix_from_json(obj)


@dataclass(frozen=True)
class Realization:
    state: np.ndarray
    observables: dict

    def to_json(self) -> dict:
        return {
            "state": matrix_to_json(as_density(self.state)),
            "observables": {n: matrix_to_json(A) for n, A in self.observables.items()},
            "assignment": {n: n for n in self.observables},
        }


def realization_from_json(obj) -> Realization:
    state = state_from_json(obj["state"])
    ops = {n: matrix_from_json(m) for n, m in obj["observables"].items()}
    binding = obj.get("assignment") or {n: n for n in ops}
    return Realization(state, {scen_name: ops[op_name] for scen_name, op_name in binding.items()})
