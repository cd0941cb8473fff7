"""Exact two-phase simplex over rationals with Bland's anti-cycling rule.

Problems are given in standard form::

    minimize  c.x   subject to  A x = b,  x >= 0

and every number is a Fraction, so feasibility verdicts and certificates are
exact.  The tableau is dense; the systems solved in this package have at most
a few hundred columns.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True)
class LPResult:
    """Outcome of a standard-form solve.

    status is "optimal", "infeasible" or "unbounded".  For "optimal", ``x`` is
    an optimal basic solution and ``dual`` the simplex multipliers (so that
    ``c - A^T dual >= 0``).  For "infeasible", ``farkas`` is a vector ``y``
    with ``y^T A <= 0`` componentwise and ``y^T b > 0``.  For "unbounded",
    ``ray`` is a direction ``r >= 0`` with ``A r = 0`` and ``c.r < 0``.
    """

    status: str
    x: tuple | None = None
    value: Fraction | None = None
    dual: tuple | None = None
    farkas: tuple | None = None
    ray: tuple | None = None

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"


def _frac_matrix(A) -> list[list[Fraction]]:
    return [[Fraction(v) for v in row] for row in A]


class _Tableau:
    """Row-reduced tableau: rows[i] holds B^-1 [A | I] and rhs[i] holds B^-1 b."""

    def __init__(self, A: list[list[Fraction]], b: list[Fraction]):
        m = len(A)
        n = len(A[0]) if m else 0
        self.n = n
        self.rows = []
        for i in range(m):
            art = [Fraction(0)] * m
            art[i] = Fraction(1)
            self.rows.append(A[i] + art)
        self.rhs = list(b)
        self.basis = [n + i for i in range(m)]

    def pivot(self, r: int, j: int) -> None:
        row = self.rows[r]
        p = row[j]
        if p != 1:
            inv = 1 / p
            row[:] = [v * inv for v in row]
            self.rhs[r] *= inv
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other[j]
            if f:
                other[:] = [a - f * b_ for a, b_ in zip(other, row)]
                self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = j

    def reduced_costs(self, cost: list[Fraction]) -> list[Fraction]:
        rc = list(cost)
        for i, bj in enumerate(self.basis):
            cb = cost[bj]
            if cb:
                row = self.rows[i]
                rc = [a - cb * v for a, v in zip(rc, row)]
        return rc

    def run(self, cost: list[Fraction], allowed: int) -> tuple[str, int | None]:
        """Bland's-rule simplex on columns < allowed; returns status and unbounded column."""
        while True:
            rc = self.reduced_costs(cost)
            entering = next((j for j in range(allowed) if rc[j] < 0), None)
            if entering is None:
                return "optimal", None
            best = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    ratio = self.rhs[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return "unbounded", entering
            self.pivot(best[1], entering)


def solve_standard(A: Sequence[Sequence], b: Sequence, c: Sequence | None = None) -> LPResult:
    """Solve min c.x s.t. A x = b, x >= 0 exactly; c=None is a pure feasibility problem."""
    A = _frac_matrix(A)
    b = [Fraction(v) for v in b]
    m = len(A)
    n = len(A[0]) if m else (len(c) if c is not None else 0)
    if m == 0:
        x = tuple(Fraction(0) for _ in range(n))
        if c is not None and any(Fraction(v) < 0 for v in c):
            j = next(j for j, v in enumerate(c) if Fraction(v) < 0)
            return LPResult("unbounded", ray=tuple(Fraction(int(k == j)) for k in range(n)))
        return LPResult("optimal", x=x, value=Fraction(0), dual=())
    signs = [(-1 if v < 0 else 1) for v in b]
    A = [[s * v for v in row] for s, row in zip(signs, A)]
    b = [s * v for s, v in zip(signs, b)]
    tab = _Tableau(A, b)

    phase1 = [Fraction(0)] * n + [Fraction(1)] * m
    tab.run(phase1, n + m)
    w = sum((tab.rhs[i] for i, bj in enumerate(tab.basis) if bj >= n), Fraction(0))
    if w > 0:
        rc = tab.reduced_costs(phase1)
        u = [1 - rc[n + i] for i in range(m)]
        y = tuple(s * v for s, v in zip(signs, u))
        return LPResult("infeasible", farkas=y)

    # drive zero-level artificials out of the basis; rows with no structural
    # entry are redundant and dropped
    keep = []
    for i in range(m):
        if tab.basis[i] >= n:
            j = next((j for j in range(n) if tab.rows[i][j] != 0), None)
            if j is None:
                continue
            tab.pivot(i, j)
        keep.append(i)

    cost = [Fraction(v) for v in c] if c is not None else [Fraction(0)] * n
    full_cost = cost + [Fraction(0)] * m
    sub = _Tableau.__new__(_Tableau)
    sub.n = n
    sub.rows = [tab.rows[i] for i in keep]
    sub.rhs = [tab.rhs[i] for i in keep]
    sub.basis = [tab.basis[i] for i in keep]
    status, col = sub.run(full_cost, n)
    if status == "unbounded":
        ray = [Fraction(0)] * n
        ray[col] = Fraction(1)
        for i, bj in enumerate(sub.basis):
            ray[bj] = -sub.rows[i][col]
        return LPResult("unbounded", ray=tuple(ray))
    x = [Fraction(0)] * n
    for i, bj in enumerate(sub.basis):
        x[bj] = sub.rhs[i]
    value = sum((ci * xi for ci, xi in zip(cost, x)), Fraction(0))
    # multipliers from the artificial columns: B^-1 sits there, u = c_B B^-1
    u = [Fraction(0)] * m
    for i, bj in enumerate(sub.basis):
        cb = full_cost[bj]
        if cb:
            for k in range(m):
                u[k] += cb * sub.rows[i][n + k]
    dual = tuple(s * v for s, v in zip(signs, u))
    return LPResult("optimal", x=tuple(x), value=value, dual=dual)


def lp_feasibility(A: Sequence[Sequence], b: Sequence) -> LPResult:
    """Decide whether {x >= 0 : A x = b} is nonempty.

    Returns a feasible basic point or a Farkas vector y with y^T A <= 0 and
    y^T b > 0, both in exact arithmetic.
    """
    return solve_standard(A, b)


def check_farkas(A: Sequence[Sequence], b: Sequence, y: Sequence) -> bool:
    cols = len(A[0]) if A else 0
    ok_cols = all(sum(Fraction(y[i]) * Fraction(A[i][j]) for i in range(len(A))) <= 0 for j in range(cols))
    return ok_cols and sum(Fraction(yi) * Fraction(bi) for yi, bi in zip(y, b)) > 0
