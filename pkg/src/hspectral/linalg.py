"""Small dense eigenvalue routines used by the diagnostics."""

from __future__ import annotations

import numpy as np


def jacobi_eigh(a, tol: float = 1e-14, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and eigenvectors of a symmetric matrix by cyclic Jacobi.

    Each sweep rotates away every off-diagonal pair in row order.  Iteration
    stops once the off-diagonal Frobenius norm falls below ``tol`` times the
    full norm.
    """
    a = np.array(a, dtype=np.float64)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.allclose(a, a.T, rtol=1e-12, atol=1e-12 * max(1.0, np.abs(a).max(initial=0.0))):
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    scale = np.linalg.norm(a)
    if n < 2 or scale == 0:
        return np.diag(a).copy(), v
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                h = a[q, q] - a[p, p]
                if abs(apq) <= 1e-18 * scale:
                    a[p, q] = a[q, p] = 0.0
                    continue
                if abs(h) + 1e8 * abs(apq) == abs(h):
                    # theta^2 would overflow; tan(phi) ~ apq / h
                    t = apq / h
                else:
                    theta = 0.5 * h / apq
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J with J the (p, q) rotation.
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    w = np.diag(a).copy()
    order = np.argsort(w)
    return w[order], v[:, order]


def jacobi_eigvalsh(a, **kwargs) -> np.ndarray:
    return jacobi_eigh(a, **kwargs)[0]


def power_iteration(a, x0=None, tol: float = 1e-13, max_iter: int = 100_000) -> tuple[float, np.ndarray]:
    """Dominant eigenpair of a matrix with a positive dominant eigenvalue.

    Intended for nonnegative irreducible matrices, where the Perron vector
    is positive and a positive start converges to it.
    """
    a = np.asarray(a, dtype=np.float64)
    x = np.ones(a.shape[0]) if x0 is None else np.array(x0, dtype=np.float64)
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(max_iter):
        y = a @ x
        lam_new = float(x @ y)
        ny = np.linalg.norm(y)
        if ny == 0:
            return 0.0, x
        y /= ny
        if np.linalg.norm(y - x) <= tol and abs(lam_new - lam) <= tol * max(1.0, abs(lam_new)):
            return lam_new, y
        x, lam = y, lam_new
    return lam, x
