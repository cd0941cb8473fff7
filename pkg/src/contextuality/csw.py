"""Exclusivity-graph form of correlation inequalities and the Lovasz theta function.

A full-correlation inequality over two-observable contexts is rewritten with

    +<XY> = 2 (p(++|XY) + p(--|XY)) - 1,    -<XY> = 2 (p(+-|XY) + p(-+|XY)) - 1

as ``s * Sigma - t`` where Sigma is a sum of event probabilities.  Its quantum
maximum is then ``s * theta(G) - t`` for the exclusivity graph G of the events.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .polytope import BooleInequality

SDP_GAP = 1e-8
REPORT_GAP = 1e-7
MAX_OUTER = 200
BARRIER_FACTOR = 4.0
MAX_VERTICES = 64


class CswError(ValueError):
    pass


class SolverError(RuntimeError):
    def __init__(self, message: str, gap: float):
        super().__init__(f"{message} (achieved gap {gap:.3g})")
        self.gap = gap


@dataclass(frozen=True)
class Event:
    context: tuple
    outcome: str  # e.g. "+-"

    def assignment(self) -> dict:
        return dict(zip(self.context, self.outcome))

    def __str__(self) -> str:
        return f"{self.outcome}|{','.join(self.context)}"


@dataclass(frozen=True)
class CswForm:
    """Events with unit weights; the original expression equals scale * Sigma - offset."""

    events: tuple
    scale: Fraction
    offset: Fraction
    nc_bound: Fraction

    def original_value(self, sigma):
        return self.scale * sigma - self.offset


def to_csw_form(ineq: BooleInequality) -> CswForm:
    events = []
    for ctx, coef in ineq.coefficients:
        if not (isinstance(ctx, tuple) and len(ctx) == 2):
            raise CswError(f"only two-observable contexts are supported, got {ctx!r}")
        if coef == 1:
            events += [Event(ctx, "++"), Event(ctx, "--")]
        elif coef == -1:
            events += [Event(ctx, "+-"), Event(ctx, "-+")]
        else:
            raise CswError(f"coefficient {coef} on {ctx} is not +-1")
    scale = Fraction(2)
    offset = Fraction(len(ineq.coefficients))
    nc_bound = (ineq.bound + offset) / scale
    return CswForm(tuple(events), scale, offset, nc_bound)


@dataclass(frozen=True)
class ExclusivityGraph:
    vertices: tuple
    edges: frozenset  # frozensets {u, v} of vertex indices

    @property
    def order(self) -> int:
        return len(self.vertices)

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted(tuple(sorted(e)) for e in self.edges)

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.order))
        g.add_edges_from(self.edge_list())
        return g

    def to_json(self) -> dict:
        labels = [str(v) for v in self.vertices]
        return {"vertices": labels, "edges": [[labels[a], labels[b]] for a, b in self.edge_list()]}


def make_graph(vertices: Sequence, edges) -> ExclusivityGraph:
    vertices = tuple(vertices)
    index = {v: i for i, v in enumerate(vertices)}
    if len(index) != len(vertices):
        raise CswError("duplicate vertex labels")
    es = set()
    for a, b in edges:
        ia = index[a] if a in index else a
        ib = index[b] if b in index else b
        if not (isinstance(ia, int) and isinstance(ib, int)) or not (0 <= ia < len(vertices) and 0 <= ib < len(vertices)):
            raise CswError(f"edge ({a}, {b}) references unknown vertices")
        if ia == ib:
            raise CswError("self-loops are not allowed")
        es.add(frozenset((ia, ib)))
    return ExclusivityGraph(vertices, frozenset(es))


def graph_from_json(obj) -> ExclusivityGraph:
    return make_graph(obj["vertices"], [tuple(e) for e in obj["edges"]])


def exclusivity_graph(form: CswForm) -> ExclusivityGraph:
    """Join two events when they give different outcomes to a shared observable."""
    edges = []
    for (i, a), (j, b) in itertools.combinations(enumerate(form.events), 2):
        ea, eb = a.assignment(), b.assignment()
        if any(ea[n] != eb[n] for n in set(ea) & set(eb)):
            edges.append((i, j))
    return make_graph(form.events, edges)


def prism_graph(n: int) -> ExclusivityGraph:
    """Two n-cycles joined by a perfect matching (circular ladder)."""
    edges = []
    for i in range(n):
        edges += [(i, (i + 1) % n), (n + i, n + (i + 1) % n), (i, n + i)]
    return make_graph(range(2 * n), edges)


def mobius_ladder(n: int) -> ExclusivityGraph:
    """M_{2n}: a 2n-cycle with its n long diagonals."""
    m = 2 * n
    edges = [(i, (i + 1) % m) for i in range(m)] + [(i, i + n) for i in range(n)]
    return make_graph(range(m), edges)


def theta_closed_form(family: str, n: int) -> float:
    c = math.cos(math.pi / n)
    if family == "prism":
        if n < 3 or n % 2 == 0:
            raise ValueError("the prism formula holds for odd n >= 3")
        return 2 * n * c / (1 + c)
    if family == "mobius":
        if n < 4 or n % 2:
            raise ValueError("the Moebius-ladder formula holds for even n >= 4")
        return n / 2 * (1 + c)
    raise ValueError(f"unknown family {family!r}")


def family_graph(family: str, n: int) -> ExclusivityGraph:
    if family == "prism":
        return prism_graph(n)
    if family == "mobius":
        return mobius_ladder(n)
    raise ValueError(f"unknown family {family!r}")


@dataclass(frozen=True)
class ThetaResult:
    value: float
    primal: float
    dual: float
    gap: float
    outer_iterations: int
    newton_steps: int
    matrix: np.ndarray


def lovasz_theta(g: ExclusivityGraph, gap_tol: float = SDP_GAP, max_outer: int = MAX_OUTER) -> ThetaResult:
    """max <J, B> over B >= 0, tr B = 1, B_uv = 0 on edges.

    Primal log-barrier method: minimize -s <J,B> - log det B over the affine
    slice, with s multiplied by 4 after each centering, starting from
    B = I/m.  A dual-feasible point t I - J + (edge terms) >= 0 is rebuilt
    from each centered iterate, so the reported gap is a certified bound.
    """
    m = g.order
    if m == 0:
        return ThetaResult(0.0, 0.0, 0.0, 0.0, 0, 0, np.zeros((0, 0)))
    if m > MAX_VERTICES:
        raise CswError(f"graph has {m} vertices, cap is {MAX_VERTICES}")
    edge_set = {tuple(sorted(e)) for e in g.edges}
    # free coordinates: diagonal entries and non-edge pairs
    coords = [(a, a) for a in range(m)] + [
        (a, b) for a, b in itertools.combinations(range(m), 2) if (a, b) not in edge_set
    ]
    ia = np.array([c[0] for c in coords])
    ib = np.array([c[1] for c in coords])
    diag = ia == ib
    k = len(coords)

    def assemble(x):
        B = np.zeros((m, m))
        B[ia, ib] = x
        B[ib, ia] = x
        return B

    x = np.where(diag, 1.0 / m, 0.0)
    s = 1.0
    newton_total = 0
    best_primal, best_dual, best_B = -math.inf, math.inf, None
    stall = 0
    outer = 0
    for outer in range(1, max_outer + 1):
        prev_decrement = math.inf
        for _ in range(100):
            B = assemble(x)
            L = np.linalg.cholesky(B)
            U = np.linalg.inv(L)
            # Newton step as least squares in scaled coordinates: with
            # M_i = L^-1 A_i L^-T the Hessian is M^T M and the gradient is
            # -M^T vec(I + s L^T J L), so only cond(M) = sqrt(cond(H)) matters
            Ua, Ub = U[:, ia], U[:, ib]
            M = np.einsum("pk,qk->pqk", Ua, Ub)
            M = np.where(diag, M, M + M.transpose(1, 0, 2)).reshape(m * m, k)
            ones = L.T @ np.ones(m)
            R = (np.eye(m) + s * np.outer(ones, ones)).reshape(m * m)
            # trace-preserving directions: dx = N z
            MN = np.concatenate([M[:, 1:m] - M[:, :1], M[:, m:]], axis=1)
            z = np.linalg.lstsq(MN, R, rcond=None)[0]
            dx = np.concatenate([[-z[: m - 1].sum()], z])
            decrement = float(np.sum((MN @ z) ** 2))
            newton_total += 1
            if decrement / 2 <= 1e-12:
                break
            # quadratic convergence has stalled at rounding level
            if decrement < 1e-6 and decrement > 0.5 * prev_decrement:
                break
            prev_decrement = decrement
            # damped Newton: 1/(1+lambda) keeps a self-concordant barrier's
            # iterate feasible without comparing large objective values
            lam = math.sqrt(decrement)
            step = 1.0 if lam < 0.25 else 1.0 / (1.0 + lam)
            while step >= 1e-14 and _logdet(assemble(x + step * dx)) is None:
                step *= 0.5
            if step < 1e-14:
                break
            x = x + step * dx
        B = assemble(x)
        # every iterate is primal feasible and every rebuilt dual point is dual
        # feasible, so the best of each side bounds theta independently
        primal = float(np.sum(B))
        dual = min(_dual_bound(B, s, edge_set), _slackness_dual(B, edge_set), _range_dual(B, edge_set))
        if primal > best_primal:
            best_primal, best_B = primal, B
        if dual < best_dual:
            best_dual, stall = dual, 0
        else:
            stall += 1
        gap = best_dual - best_primal
        if gap <= gap_tol or (m / s <= gap_tol and stall >= 3):
            break
        s *= BARRIER_FACTOR
    primal, dual, B = best_primal, best_dual, best_B
    if dual - primal > gap_tol and edge_set:
        dual = min(dual, _dual_barrier(m, edge_set))
    gap = dual - primal
    if gap > max(REPORT_GAP, 10 * gap_tol):
        raise SolverError("theta SDP did not converge", gap)
    return ThetaResult((primal + dual) / 2, primal, dual, gap, outer, newton_total, B)


def _logdet(B):
    try:
        L = np.linalg.cholesky(B)
    except np.linalg.LinAlgError:
        return None
    return 2.0 * float(np.sum(np.log(np.diag(L))))


def _certified_dual(edge_values: dict, m: int) -> float:
    """Smallest t making t I - J + (edge terms) PSD, for fixed edge entries."""
    guess = np.full((m, m), -1.0)
    for (a, b), v in edge_values.items():
        guess[a, b] = guess[b, a] = v
    np.fill_diagonal(guess, 0.0)
    # t I - J + (edge terms) = (t - 1) I + guess, PSD iff t >= 1 - lam_min(guess)
    return float(1.0 - np.linalg.eigvalsh(guess)[0])


def _slackness_dual(B: np.ndarray, edge_set) -> float:
    """Dual point fitted to complementary slackness Z B = 0, then certified."""
    m = B.shape[0]
    edges = sorted(edge_set)
    if not edges:
        return _certified_dual({}, m)
    # Z = t I - J + sum_e w_e (E_ab + E_ba); unknowns (t, w)
    cols = [B.reshape(-1)]
    for a, b in edges:
        E = np.zeros((m, m))
        E[a, b] = E[b, a] = 1.0
        cols.append((E @ B).reshape(-1))
    A = np.stack(cols, axis=1)
    rhs = (np.ones((m, m)) @ B).reshape(-1)
    sol = np.linalg.lstsq(A, rhs, rcond=None)[0]
    # edge entries of Z are w_e - 1
    return _certified_dual({e: w - 1.0 for e, w in zip(edges, sol[1:])}, m)


def _range_dual(B: np.ndarray, edge_set) -> float:
    """Dual point fitted to Z V = 0 on the numerical range V of B, then certified.

    Near a degenerate optimum the small eigenvalues of B weight the plain
    slackness fit badly; splitting the spectrum at a wide gap and fitting
    on the dominant eigenvectors alone avoids that.
    """
    m = B.shape[0]
    edges = sorted(edge_set)
    w, V = np.linalg.eigh(B)
    w = np.clip(w[::-1], 1e-300, None)
    V = V[:, ::-1]
    ratios = w[:-1] / w[1:]
    best = math.inf
    if not edges:
        return best
    # every wide spectral gap is a candidate rank; late in the solve the
    # widest one can sit above the true optimal face
    for r in np.flatnonzero(ratios >= 1e3) + 1:
        Vr = V[:, :r]
        cols = [Vr.reshape(-1)]
        for a, b in edges:
            E = np.zeros((m, m))
            E[a, b] = E[b, a] = 1.0
            cols.append((E @ Vr).reshape(-1))
        A = np.stack(cols, axis=1)
        rhs = (np.ones((m, m)) @ Vr).reshape(-1)
        sol = np.linalg.lstsq(A, rhs, rcond=None)[0]
        best = min(best, _certified_dual({e: x - 1.0 for e, x in zip(edges, sol[1:])}, m))
    return best


def _dual_barrier(m: int, edge_set, target: float = 1e-11) -> float:
    """Certified dual value from a barrier solve of the dual SDP itself.

    min t - mu logdet(t I - J + sum_e y_e E_e) over (t, y), mu shrinking.
    Used when every primal-derived dual point stalls on a degenerate face.
    """
    edges = sorted(edge_set)
    k = len(edges) + 1
    A = np.zeros((k, m, m))
    A[0] = np.eye(m)
    for i, (a, b) in enumerate(edges, 1):
        A[i, a, b] = A[i, b, a] = 1.0
    J = np.ones((m, m))
    x = np.zeros(k)
    x[0] = m + 1.0
    mu = 1.0

    def slack(v):
        return np.tensordot(v, A, axes=1) - J

    while mu > target:
        for _ in range(60):
            try:
                L = np.linalg.cholesky(slack(x))
            except np.linalg.LinAlgError:
                break
            Li = np.linalg.inv(L)
            M = np.einsum("pr,irs,qs->ipq", Li, A, Li).reshape(k, m * m)
            H = M @ M.T
            g = -M @ np.eye(m).reshape(m * m)
            g[0] += 1.0 / mu
            dx = -np.linalg.lstsq(H, g, rcond=None)[0]
            lam = math.sqrt(max(float(-g @ dx), 0.0))
            if lam < 1e-9:
                break
            step = 1.0 if lam < 0.25 else 1.0 / (1.0 + lam)
            while step >= 1e-14 and _logdet(slack(x + step * dx)) is None:
                step *= 0.5
            if step < 1e-14:
                break
            x = x + step * dx
        mu /= 10.0
    return _certified_dual({e: y - 1.0 for e, y in zip(edges, x[1:])}, m)


def _dual_bound(B: np.ndarray, s: float, edge_set) -> float:
    """Smallest t with t I - J + (edge multipliers) >= 0, built from the central-path guess."""
    m = B.shape[0]
    U = np.linalg.inv(np.linalg.cholesky(B))
    Z = (U.T @ U) / s
    Z = (Z + Z.T) / 2
    return _certified_dual({e: Z[e] for e in edge_set}, m)


@dataclass(frozen=True)
class QuantumMaxResult:
    value: float
    theta: ThetaResult
    form: CswForm
    upper_bound_only: bool


def is_bell_scenario(ineq: BooleInequality) -> bool:
    """True when the observables split into two parties with every context across them."""
    import networkx as nx

    g = nx.Graph()
    for ctx in ineq.contexts():
        g.add_edge(*ctx)
    return nx.is_bipartite(g)


def quantum_max(ineq: BooleInequality) -> QuantumMaxResult:
    form = to_csw_form(ineq)
    th = lovasz_theta(exclusivity_graph(form))
    value = float(form.scale) * th.value - float(form.offset)
    return QuantumMaxResult(value, th, form, is_bell_scenario(ineq))
