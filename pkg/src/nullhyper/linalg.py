"""Small dense symmetric eigenproblems (cyclic Jacobi)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SYMMETRY_TOL = 1e-10
MAX_SWEEPS = 60


@dataclass(frozen=True)
class SymEigen:
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # columns, orthonormal


def _fix_signs(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    for j in range(v.shape[1]):
        col = v[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size and col[nz[0]] < 0:
            v[:, j] = -col
    return v


def eig_sym(a) -> SymEigen:
    """Cyclic Jacobi rotations until the off-diagonal mass is at round-off.

    Eigenvalues ascend; each eigenvector is signed so that its first
    non-negligible component is positive.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("eig_sym expects a square matrix")
    if np.max(np.abs(a - a.T), initial=0.0) > SYMMETRY_TOL:
        raise ValueError("eig_sym: matrix is not symmetric")
    m = a.shape[0]
    a = 0.5 * (a + a.T)
    v = np.eye(m)
    scale = max(np.max(np.abs(a)), 1e-300)
    for _ in range(MAX_SWEEPS):
        off = np.sqrt(np.sum(np.triu(a, 1) ** 2))
        if off <= 1e-16 * scale:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau)) if tau != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rot = np.eye(m)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                v = v @ rot
    else:
        off = np.sqrt(np.sum(np.triu(a, 1) ** 2))
        if off > 1e-12 * scale:
            raise np.linalg.LinAlgError("Jacobi iteration did not converge")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return SymEigen(w[order], _fix_signs(v[:, order]))


def orthonormal_complement(basis: np.ndarray, gram: np.ndarray | None = None) -> np.ndarray:
    """Columns spanning the gram-orthogonal complement of ``basis`` columns."""
    n = basis.shape[0]
    gram = np.eye(n) if gram is None else gram
    cols = []
    for c in basis.T:
        w = c.astype(float)
        for _ in range(2):
            for q in cols:
                w = w - (q @ gram @ w) / (q @ gram @ q) * q
        if np.sqrt(abs(w @ gram @ w)) > 1e-8:
            cols.append(w)
    out = []
    for e in np.eye(n):
        w = e.copy()
        for _ in range(2):
            for c in cols + out:
                w = w - (c @ gram @ w) / (c @ gram @ c) * c
        nrm = np.sqrt(abs(w @ gram @ w))
        if nrm > 1e-8:
            out.append(w / nrm)
        if len(out) == n - len(cols):
            break
    return np.stack(out, axis=1)
