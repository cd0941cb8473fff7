"""Seeded samplers for ontological models of qubits (and Bell's model in any dimension).

Each model has a sampler for ontic states and a pure response function; a
simulation draws N ontic states, applies the response and compares the
empirical frequency with the Born-rule value.

Random numbers come from numpy's PCG64 bit generator seeded through a
SeedSequence, which also provides independent child streams.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .quantum import PAULIS, as_density, bloch_density, density_bloch, is_projector

RNG_ALGORITHM = "numpy.random.PCG64 seeded via numpy.random.SeedSequence"
BATCH = 1 << 18


def make_rng(seed: int) -> np.random.Generator:
    if seed < 0 or seed >= 1 << 64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def split_rngs(seed: int, count: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


def bloch_vector(theta: float, phi: float = 0.0) -> np.ndarray:
    return np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])


def as_bloch(v) -> np.ndarray:
    """Unit Bloch vector from a 3-vector, a qubit ket or a pure qubit density matrix."""
    a = np.asarray(v)
    if a.shape == (3,):
        if np.iscomplexobj(a) and np.any(a.imag != 0):
            raise ValueError("a Bloch vector is real")
        r = a.real.astype(float)
    elif a.shape == (2,) or a.shape == (2, 2):
        r = density_bloch(as_density(a))
    else:
        raise ValueError(f"cannot read a qubit state from shape {a.shape}")
    if abs(np.linalg.norm(r) - 1) > 1e-12:
        raise ValueError("Bloch vector must have unit norm (pure state)")
    return r


def qubit_pvm(pvm) -> tuple[np.ndarray, np.ndarray]:
    """(Pi_0, Pi_1) from a pair of projectors or from the Bloch vector of Pi_0."""
    if isinstance(pvm, (tuple, list)) and len(pvm) == 2 and np.asarray(pvm[0]).shape == (2, 2):
        p0, p1 = (np.asarray(p, dtype=complex) for p in pvm)
    else:
        r = as_bloch(pvm)
        p0, p1 = bloch_density(r), bloch_density(-r)
    _check_pvm([p0, p1])
    return p0, p1


def _check_pvm(pvm: Sequence[np.ndarray]) -> None:
    d = pvm[0].shape[0]
    for P in pvm:
        if not is_projector(P):
            raise ValueError("PVM element is not a projector")
    if np.max(np.abs(sum(pvm) - np.eye(d))) > 1e-10:
        raise ValueError("PVM elements do not sum to the identity")


def sample_sphere(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform points on S^2 from normalized Gaussian triples."""
    g = rng.standard_normal((n, 3))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def step(x) -> np.ndarray:
    """Heaviside step with step(0) = 1."""
    return (np.asarray(x) >= 0).astype(np.int8)


@dataclass(frozen=True)
class OnticSamples:
    """Ontic states of a batch.

    ``sphere`` holds a unit vector per sample (the KS hidden variable, or the
    Bloch vector of the pure-state label), ``interval`` a real in [0, 1] when
    the model has one, and ``atomic`` marks samples whose sphere coordinate
    is a point mass (a delta at the prepared state) rather than drawn from a
    density.
    """

    sphere: np.ndarray | None
    interval: np.ndarray | None
    atomic: np.ndarray

    def __len__(self) -> int:
        return len(self.atomic)


@dataclass(frozen=True)
class QueryEstimate:
    label: str
    estimate: float
    target: float
    std_error: float
    z_score: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class SimulationReport:
    model: str
    samples: int
    seed: int
    rng: str
    queries: tuple
    details: dict = field(default_factory=dict)

    @property
    def max_abs_z(self) -> float:
        return max(abs(q.z_score) for q in self.queries)

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "samples": self.samples,
            "seed": self.seed,
            "rng": self.rng,
            "queries": [q.to_json() for q in self.queries],
            "details": self.details,
        }


def _z(estimate: float, target: float, se: float) -> float:
    if se > 0:
        return (estimate - target) / se
    return 0.0 if abs(estimate - target) <= 1e-12 else math.copysign(math.inf, estimate - target)


def probability_query(label: str, hits: np.ndarray, target: float) -> QueryEstimate:
    n = len(hits)
    p = float(np.count_nonzero(hits)) / n
    se = math.sqrt(p * (1 - p) / n)
    return QueryEstimate(label, p, float(target), se, _z(p, target, se))


def expectation_query(label: str, values: np.ndarray, target: float) -> QueryEstimate:
    n = len(values)
    mean = float(np.mean(values))
    se = float(np.std(values)) / math.sqrt(n)
    return QueryEstimate(label, mean, float(target), se, _z(mean, target, se))


def _check_n(N: int) -> None:
    if N < 1:
        raise ValueError("sample count must be positive")


# -- Kochen-Specker model --------------------------------------------------------

def ks_sample(psi, N: int, rng: np.random.Generator) -> OnticSamples:
    """lambda with density (1/pi) step(psi.lambda) psi.lambda, by rejection from the uniform sphere."""
    psi = as_bloch(psi)
    out = []
    have = 0
    while have < N:
        lam = sample_sphere(rng, BATCH)
        u = rng.random(BATCH)
        keep = lam[u < lam @ psi]
        out.append(keep)
        have += len(keep)
    lam = np.concatenate(out)[:N]
    return OnticSamples(lam, None, np.zeros(N, dtype=bool))


def ks_response(phi, lam: np.ndarray) -> np.ndarray:
    return step(lam @ as_bloch(phi))


def ks_model(psi, phi, N: int = 10**6, seed: int = 0) -> SimulationReport:
    _check_n(N)
    psi_v, phi_v = as_bloch(psi), as_bloch(phi)
    s = ks_sample(psi_v, N, make_rng(seed))
    hits = ks_response(phi_v, s.sphere) == 1
    target = 0.5 * (1 + float(phi_v @ psi_v))
    return SimulationReport("ks", N, seed, RNG_ALGORITHM, (probability_query("p(phi|psi)", hits, target),))


# -- Bell's model ----------------------------------------------------------------

def bell_sample(psi, N: int, rng: np.random.Generator) -> OnticSamples:
    """(lambda_psi, lambda_x): lambda_psi is the prepared state, lambda_x uniform on [0, 1].

    ``psi`` is a real Bloch 3-vector or a density matrix of any dimension;
    qubit states also get their Bloch vector recorded as the sphere coordinate.
    """
    lam_x = rng.random(N)
    a = np.asarray(psi)
    if a.ndim == 1 and not np.iscomplexobj(a) and a.shape == (3,):
        r = as_bloch(a)
    elif a.ndim == 2 and a.shape == (2, 2):
        r = as_bloch(a)
    elif a.ndim == 2:
        return OnticSamples(None, lam_x, np.ones(N, dtype=bool))
    else:
        raise ValueError("pass a Bloch vector or a density matrix")
    return OnticSamples(np.broadcast_to(r, (N, 3)), lam_x, np.ones(N, dtype=bool))


def bell_qubit_response(lam_psi, pvm, lam_x) -> np.ndarray:
    """Outcome 0 iff tr(lambda_psi Pi_0) - lambda_x >= 0; returns the outcome index."""
    p0, _ = qubit_pvm(pvm)
    rho = bloch_density(as_bloch(lam_psi))
    threshold = float(np.trace(rho @ p0).real)
    return (step(threshold - np.asarray(lam_x)) == 0).astype(np.int8)


def bell_qubit_model(psi, pvm, N: int = 10**6, seed: int = 0) -> SimulationReport:
    _check_n(N)
    p0, p1 = qubit_pvm(pvm)
    r = as_bloch(psi)
    s = bell_sample(r, N, make_rng(seed))
    outcome = bell_qubit_response(r, (p0, p1), s.interval)
    target = float(np.trace(bloch_density(r) @ p0).real)
    return SimulationReport("bell", N, seed, RNG_ALGORITHM, (probability_query("p(0)", outcome == 0, target),))


def _pure_density(psi) -> np.ndarray:
    a = np.asarray(psi, dtype=complex)
    rho = as_density(a)
    if abs(np.trace(rho @ rho).real - 1) > 1e-10:
        raise ValueError("Bell's model needs a pure state")
    return rho


def bell_general_response(lam_psi, pvm: Sequence, lam) -> np.ndarray:
    """Outcome k with sum_{i<k} p_i < lambda <= sum_{i<=k} p_i; lambda = 0 gives outcome 0."""
    rho = _pure_density(lam_psi)
    probs = np.array([np.trace(rho @ P).real for P in pvm])
    cum = np.cumsum(probs)
    k = np.searchsorted(cum, np.asarray(lam), side="left")
    return np.minimum(k, len(pvm) - 1)


def bell_general_intervals(lam_psi, pvm: Sequence, lam) -> np.ndarray:
    """Iverson bracket of every outcome separately, shape (len(pvm), N)."""
    rho = _pure_density(lam_psi)
    probs = np.array([np.trace(rho @ P).real for P in pvm])
    lam = np.asarray(lam)
    rows = []
    lower = 0.0
    for k, p in enumerate(probs):
        upper = lower + p if k < len(probs) - 1 else max(lower + p, 1.0)
        inside = (lam > lower) & (lam <= upper)
        if k == 0:
            inside |= lam == 0
        rows.append(inside)
        lower = upper
    return np.array(rows)


def bell_general_model(psi, pvm: Sequence, N: int = 10**6, seed: int = 0) -> SimulationReport:
    _check_n(N)
    pvm = [np.asarray(P, dtype=complex) for P in pvm]
    rho = _pure_density(psi)
    if rho.shape[0] > 16:
        raise ValueError("dimension above 16")
    _check_pvm(pvm)
    s = bell_sample(rho, N, make_rng(seed))
    outcome = bell_general_response(rho, pvm, s.interval)
    queries = []
    for k, P in enumerate(pvm):
        queries.append(probability_query(f"p({k})", outcome == k, float(np.trace(rho @ P).real)))
    return SimulationReport("bell-general", N, seed, RNG_ALGORITHM, tuple(queries), {"outcome_order": "caller"})


# -- Bell-Mermin model -----------------------------------------------------------

def qubit_observable_parts(A) -> tuple[float, np.ndarray]:
    """(a0, a) with A = a0 1 + a.sigma; also accepts such a pair directly."""
    if isinstance(A, tuple) and len(A) == 2:
        return float(A[0]), np.asarray(A[1], dtype=float)
    M = np.asarray(A, dtype=complex)
    if M.shape != (2, 2) or np.max(np.abs(M - M.conj().T)) > 1e-12:
        raise ValueError("expected a Hermitian 2x2 observable")
    a0 = float(np.trace(M).real) / 2
    return a0, np.array([np.trace(M @ s).real / 2 for s in PAULIS])


def bell_mermin_response(A, psi_hat, lam) -> np.ndarray:
    """a0 + |a| sign(a.(lambda + psi_hat)) with sign(0) = +1."""
    a0, a = qubit_observable_parts(A)
    proj = (np.asarray(lam) + np.asarray(psi_hat)) @ a
    return a0 + np.linalg.norm(a) * np.where(proj >= 0, 1.0, -1.0)


def bell_mermin_model(psi, A, N: int = 10**6, seed: int = 0) -> SimulationReport:
    _check_n(N)
    r = as_bloch(psi)
    a0, a = qubit_observable_parts(A)
    lam = sample_sphere(make_rng(seed), N)
    values = bell_mermin_response((a0, a), r, lam)
    return SimulationReport("bell-mermin", N, seed, RNG_ALGORITHM, (expectation_query("<A>", values, a0 + float(a @ r)),))


@dataclass(frozen=True)
class AdditivityReport:
    commuting: bool
    points: int
    violations: int
    max_deviation: float
    witness: dict | None

    @property
    def additive(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        return dict(self.__dict__)


def bell_mermin_additivity_check(A, B, points: int = 2000, seed: int = 0, tol: float = 1e-9) -> AdditivityReport:
    """Compare xi_{A+B} with xi_A + xi_B at random (psi_hat, lambda) pairs."""
    a0, a = qubit_observable_parts(A)
    b0, b = qubit_observable_parts(B)
    rng_psi, rng_lam = split_rngs(seed, 2)
    psis = sample_sphere(rng_psi, points)
    lams = sample_sphere(rng_lam, points)
    both = bell_mermin_response((a0 + b0, a + b), psis, lams)
    # the response is applied row by row: psi_hat and lambda vary together
    sep = bell_mermin_response((a0, a), psis, lams) + bell_mermin_response((b0, b), psis, lams)
    dev = np.abs(both - sep)
    bad = np.nonzero(dev > tol * (1 + abs(a0) + abs(b0) + np.linalg.norm(a) + np.linalg.norm(b)))[0]
    witness = None
    if len(bad):
        i = int(bad[0])
        witness = {
            "psi_hat": psis[i].tolist(),
            "lambda": lams[i].tolist(),
            "xi_sum_observable": float(both[i]),
            "sum_of_xi": float(sep[i]),
        }
    commuting = bool(np.linalg.norm(np.cross(a, b)) <= 1e-12 * (1 + np.linalg.norm(a) * np.linalg.norm(b)))
    return AdditivityReport(commuting, points, int(len(bad)), float(dev.max()) if points else 0.0, witness)


# -- LJBR model (qubit) ------------------------------------------------------------

def ljbr_f(r) -> np.ndarray:
    """1/2 (1 + cos(theta + pi/2)) with theta the polar angle of r."""
    r = np.asarray(r, dtype=float)
    theta = np.arccos(np.clip(r[..., 2], -1.0, 1.0))
    return 0.5 * (1 + np.cos(theta + np.pi / 2))


def in_north(r) -> np.ndarray:
    return np.asarray(r)[..., 2] > 0


def ljbr_sample(psi, N: int, rng: np.random.Generator) -> OnticSamples:
    """Mixture of a delta at psi (lambda uniform on [f, 1]) and, with weight f,
    the uniform distribution on Lambda_N = {(l, lambda): l in N, 0 <= lambda < f(l)},
    uniform jointly in hemisphere area times lambda length."""
    r = as_bloch(psi)
    if not in_north(r):
        lam = rng.random(N)
        return OnticSamples(np.broadcast_to(r, (N, 3)).copy(), lam, np.ones(N, dtype=bool))
    f = float(ljbr_f(r))
    branch = rng.random(N) < f
    n_uniform = int(np.count_nonzero(branch))
    sphere = np.broadcast_to(r, (N, 3)).copy()
    lam = f + (1 - f) * rng.random(N)
    got_s, got_l = [], []
    have = 0
    while have < n_uniform:
        pts = sample_sphere(rng, BATCH)
        pts[:, 2] = np.abs(pts[:, 2])
        ls = 0.5 * rng.random(BATCH)  # f <= 1/2 on the hemisphere
        keep = ls < ljbr_f(pts)
        got_s.append(pts[keep])
        got_l.append(ls[keep])
        have += int(np.count_nonzero(keep))
    if n_uniform:
        sphere[branch] = np.concatenate(got_s)[:n_uniform]
        lam[branch] = np.concatenate(got_l)[:n_uniform]
    return OnticSamples(sphere, lam, ~branch)


def ljbr_response(phi0, lam_psi: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Outcome index: 0 iff lambda <= tr(lambda_psi phi_0) (Bell's rule on the ontic label)."""
    p = 0.5 * (1 + np.asarray(lam_psi) @ as_bloch(phi0))
    return (~(np.asarray(lam) <= p)).astype(np.int8)


def ljbr_qubit_model(psi, pvm, N: int = 10**6, seed: int = 0) -> SimulationReport:
    _check_n(N)
    r = as_bloch(psi)
    p0, p1 = qubit_pvm(pvm)
    phi0, phi1 = density_bloch(p0), density_bloch(p1)
    if np.arccos(np.clip(phi0[2], -1, 1)) > np.arccos(np.clip(phi1[2], -1, 1)) + 1e-12:
        raise ValueError("label the PVM so that phi_0 has the smaller polar angle")
    s = ljbr_sample(r, N, make_rng(seed))
    outcome = ljbr_response(phi0, s.sphere, s.interval)
    target = float(np.trace(bloch_density(r) @ p0).real)
    details = {"f": float(ljbr_f(r)) if in_north(r) else None, "in_north": bool(in_north(r)),
               "uniform_branch_fraction": float(np.mean(~s.atomic))}
    return SimulationReport("ljbr", N, seed, RNG_ALGORITHM, (probability_query("p(0)", outcome == 0, target),), details)


# -- overlap of ontic distributions -------------------------------------------

@dataclass(frozen=True)
class OverlapEstimate:
    overlap: float
    cells: int
    sphere_cells: int
    interval_cells: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _sphere_cell(points: np.ndarray, bands: int, sectors: int) -> np.ndarray:
    """Equal-area cells: uniform bands in z (Archimedes) times uniform sectors in azimuth."""
    z = np.clip(points[:, 2], -1.0, 1.0)
    zb = np.minimum(((z + 1) / 2 * bands).astype(np.int64), bands - 1)
    az = np.arctan2(points[:, 1], points[:, 0]) + np.pi
    ab = np.minimum((az / (2 * np.pi) * sectors).astype(np.int64), sectors - 1)
    return zb * sectors + ab


def _cell_keys(s: OnticSamples, sphere_grid, interval_cells: int) -> list:
    n = len(s)
    parts = []
    if s.sphere is not None:
        parts.append(_sphere_cell(np.asarray(s.sphere), *sphere_grid))
    if s.interval is not None:
        iv = np.minimum((np.asarray(s.interval) * interval_cells).astype(np.int64), interval_cells - 1)
        parts.append(iv)
    keys = []
    sphere = None if s.sphere is None else np.asarray(s.sphere)
    for i in range(n):
        cell = tuple(int(p[i]) for p in parts)
        if s.atomic[i] and sphere is not None:
            # point masses only meet point masses at exactly the same location
            keys.append(("atom", tuple(sphere[i].tolist())) + cell)
        else:
            keys.append(("cont",) + cell)
    return keys


def psi_ontic_overlap(a: OnticSamples, b: OnticSamples, cells: int = 10_000) -> OverlapEstimate:
    """Empirical mass shared by two ontic distributions, sum over cells of min(freq_a, freq_b).

    Spaces with both a sphere and an interval coordinate split the cell
    budget evenly between them (sqrt(cells) each).
    """
    has_sphere = a.sphere is not None
    has_interval = a.interval is not None
    if has_sphere != (b.sphere is not None) or has_interval != (b.interval is not None):
        raise ValueError("samples live on different ontic spaces")
    if has_sphere and has_interval:
        sc = ic = max(int(round(math.sqrt(cells))), 1)
    elif has_sphere:
        sc, ic = cells, 1
    else:
        sc, ic = 1, cells
    side = max(int(round(math.sqrt(sc))), 1)
    grid = (side, max(sc // side, 1))
    from collections import Counter

    ca = Counter(_cell_keys(a, grid, ic))
    cb = Counter(_cell_keys(b, grid, ic))
    na, nb = len(a), len(b)
    total = sum(min(ca[k] / na, cb[k] / nb) for k in ca.keys() & cb.keys())
    return OverlapEstimate(float(total), grid[0] * grid[1] * ic, grid[0] * grid[1] if has_sphere else 0, ic if has_interval else 0)
