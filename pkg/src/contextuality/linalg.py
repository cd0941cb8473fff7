"""Cyclic Jacobi eigensolver for real symmetric and complex Hermitian matrices.

A Hermitian ``H = X + iY`` is diagonalized through its real symmetric
embedding ``[[X, -Y], [Y, X]]``, whose spectrum is that of ``H`` with every
eigenvalue doubled.
"""
from __future__ import annotations

import numpy as np

JACOBI_TOL = 1e-13
MAX_SWEEPS = 100


def jacobi_eigh(S: np.ndarray, tol: float = JACOBI_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a real symmetric matrix."""
    a = np.array(S, dtype=float, copy=True)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    v = np.eye(n)
    scale = max(np.linalg.norm(a), 1.0)
    for _ in range(MAX_SWEEPS):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # rotate rows/columns p and q
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    w = np.diag(a).copy()
    order = np.argsort(w)
    return w[order], v[:, order]


def real_embedding(H: np.ndarray) -> np.ndarray:
    X = H.real
    Y = H.imag
    return np.block([[X, -Y], [Y, X]])


def hermitian_eigvalsh(H: np.ndarray, tol: float = JACOBI_TOL) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, ascending, each listed once."""
    H = np.asarray(H, dtype=complex)
    w, _ = jacobi_eigh(real_embedding(H), tol)
    return w[::2]


def hermitian_eigh(H: np.ndarray, tol: float = JACOBI_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and orthonormal complex eigenvectors of a Hermitian matrix."""
    H = np.asarray(H, dtype=complex)
    d = H.shape[0]
    w, V = jacobi_eigh(real_embedding(H), tol)
    # each eigenspace of H appears twice in the embedding, as (u, v) and (-v, u);
    # collect complex vectors u + iv and orthonormalize within eigenvalue clusters
    vecs = V[:d, :] + 1j * V[d:, :]
    out_w, out_v = [], []
    i = 0
    while i < 2 * d:
        j = i
        while j < 2 * d and abs(w[j] - w[i]) <= 1e-9 * max(1.0, abs(w[i])):
            j += 1
        basis = []
        for k in range(i, j):
            u = vecs[:, k].copy()
            for b in basis:
                u = u - b * np.vdot(b, u)
            nrm = np.linalg.norm(u)
            if nrm > 1e-6:
                basis.append(u / nrm)
        for b in basis[: (j - i) // 2]:
            out_w.append(w[i])
            out_v.append(b)
        i = j
    return np.array(out_w), np.array(out_v).T
