"""Double description method in exact integer arithmetic.

The core routine computes the extreme rays of a pointed polyhedral cone
``{h : G h >= 0}``.  Facet enumeration and vertex enumeration of polytopes
both reduce to it through homogenization:

* facets of conv(V): extreme rays of ``{(beta, -a) : beta - a.v >= 0 for v in V}``
* vertices of ``{x : A x <= b}``: extreme rays of ``{(t, x) : t b - A x >= 0, t >= 0}``
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence


class DDError(ValueError):
    pass


def _primitive(vec: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for v in vec:
        g = math.gcd(g, v)
    if g == 0:
        return tuple(vec)
    return tuple(v // g for v in vec)


def integer_row(row: Sequence) -> tuple[int, ...]:
    """Scale a rational row to a primitive integer row (same direction)."""
    fr = [Fraction(v) for v in row]
    lcm = 1
    for v in fr:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    return _primitive([int(v * lcm) for v in fr])


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def _independent_rows(G: list[tuple[int, ...]], d: int) -> list[int]:
    """Indices of a maximal set of linearly independent rows, greedy in order."""
    chosen = []
    basis: list[list[Fraction]] = []  # echelon rows with pivot columns
    pivots: list[int] = []
    for idx, row in enumerate(G):
        v = [Fraction(x) for x in row]
        for b, p in zip(basis, pivots):
            if v[p]:
                f = v[p] / b[p]
                v = [x - f * y for x, y in zip(v, b)]
        p = next((j for j, x in enumerate(v) if x), None)
        if p is None:
            continue
        basis.append(v)
        pivots.append(p)
        chosen.append(idx)
        if len(chosen) == d:
            break
    return chosen


def _inverse_columns(M: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Columns of M^-1 as primitive integer vectors (M square, invertible)."""
    d = len(M)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(d)] for i, row in enumerate(M)]
    for col in range(d):
        piv = next(r for r in range(col, d) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(d):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    inv = [row[d:] for row in aug]
    return [integer_row([inv[i][j] for i in range(d)]) for j in range(d)]


def extreme_rays(G: Sequence[Sequence]) -> list[tuple[int, ...]]:
    """Extreme rays of the pointed cone {h : G h >= 0}, as primitive integer vectors.

    Raises DDError if G does not have full column rank (the cone then has a
    nontrivial lineality space).
    """
    rows = [integer_row(r) for r in G]
    if not rows:
        raise DDError("empty constraint system")
    d = len(rows[0])
    init = _independent_rows(rows, d)
    if len(init) < d:
        raise DDError("constraint matrix is rank deficient; cone is not pointed")
    rays = _inverse_columns([rows[i] for i in init])
    # zero sets are bitmasks over constraint indices
    zero = []
    for r in rays:
        z = 0
        for k, i in enumerate(init):
            if _dot(rows[i], r) == 0:
                z |= 1 << i
        zero.append(z)
    processed = set(init)
    for i in range(len(rows)):
        if i in processed:
            continue
        g = rows[i]
        vals = [_dot(g, r) for r in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        zer = [k for k, v in enumerate(vals) if v == 0]
        new_rays = []
        new_zero = []
        if pos and neg:
            for p in pos:
                for q in neg:
                    common = zero[p] & zero[q]
                    if bin(common).count("1") < d - 2:
                        continue
                    if any(
                        k != p and k != q and (zero[k] & common) == common for k in range(len(rays))
                    ):
                        continue
                    vp, vq = vals[p], vals[q]
                    r = _primitive([vp * a - vq * b for a, b in zip(rays[q], rays[p])])
                    new_rays.append(r)
                    new_zero.append(common | (1 << i))
        keep = pos + zer
        rays = [rays[k] for k in keep] + new_rays
        zero = [zero[k] | ((1 << i) if vals[k] == 0 else 0) for k in keep] + new_zero
        processed.add(i)
    return rays


def facets_of_points(points: Sequence[Sequence]) -> list[tuple[tuple[Fraction, ...], Fraction]]:
    """Facet inequalities a.x <= beta of conv(points), as (a, beta) pairs.

    The hull must be full-dimensional.  Each pair is primitive integral.
    """
    pts = [[Fraction(v) for v in p] for p in points]
    if not pts:
        raise DDError("no points")
    G = [[Fraction(1)] + p for p in pts]
    try:
        rays = extreme_rays(G)
    except DDError:
        raise DDError("point set is not full-dimensional") from None
    out = []
    for r in rays:
        beta, a = r[0], [-v for v in r[1:]]
        out.append((tuple(Fraction(v) for v in a), Fraction(beta)))
    return out


def vertices_of_inequalities(A: Sequence[Sequence], b: Sequence) -> list[tuple[Fraction, ...]]:
    """Vertices of the bounded polytope {x : A x <= b}.

    Raises DDError if the polytope is unbounded or empty.
    """
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    if not A:
        raise DDError("no inequalities")
    d = len(A[0])
    G = [[bi] + [-v for v in row] for row, bi in zip(A, b)]
    G.append([Fraction(1)] + [Fraction(0)] * d)
    try:
        rays = extreme_rays(G)
    except DDError:
        raise DDError("polytope is unbounded (constraint matrix rank deficient)") from None
    verts = []
    for r in rays:
        if r[0] == 0:
            raise DDError("polytope is unbounded: recession direction " + str(r[1:]))
        verts.append(tuple(Fraction(v, r[0]) for v in r[1:]))
    if not verts:
        raise DDError("polytope is empty")
    return verts
