"""Numerical checks on the second-order objects behind the power-like method.

None of this runs inside the solver loop; the CLI calls
:func:`second_order_report` only when asked.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .linalg import jacobi_eigvalsh
from .objective import b_matrix, f_value, grad_f, hessian_f, symmetrize
from .solvers import EigenPair, IterationTrace
from .tensor import DenseTensor, contract_to_matrix

__all__ = [
    "DiagnosticError",
    "SecondOrderReport",
    "abar_matrix",
    "contraction_matrix_T",
    "f_value",
    "grad_f",
    "hessian_f",
    "kkt_residual",
    "qlinear_rate",
    "second_order_report",
    "spectral_radius",
    "symmetrize",
]

CONVERGED_TOL = 1e-8


class DiagnosticError(ValueError):
    pass


def _tensor(A) -> DenseTensor:
    return getattr(A, "tensor", A)


def _check_pair(pair: EigenPair, tol: float = CONVERGED_TOL):
    if not pair.residual <= tol:
        raise DiagnosticError(f"pair is not converged (residual {pair.residual:.3e} > {tol:g})")


def kkt_residual(A, x) -> float:
    """``|grad f(y) + m x^[m]|`` at ``y = log x``; zero exactly at the eigenvector."""
    A = _tensor(A)
    return float(np.linalg.norm(grad_f(A, x) + A.order * np.asarray(x) ** A.order))


def contraction_matrix_T(A, pair: EigenPair) -> np.ndarray:
    """``-(1/m) lam^{-1} D B(x) D`` with ``D = diag(x^[-(m-2)/2])`` at a converged pair.

    Its spectrum governs the local linear rate of the power-like iteration.
    """
    _check_pair(pair)
    A = _tensor(A)
    m = A.order
    x = np.asarray(pair.x)
    w = x ** (-(m - 2) / 2)
    T = -(w[:, None] * b_matrix(A, x) * w[None, :]) / (m * pair.lambda_scaled)
    return T


def spectral_radius(M) -> float:
    M = np.asarray(M)
    if np.allclose(M, M.T, rtol=1e-10, atol=1e-12):
        return float(np.max(np.abs(jacobi_eigvalsh(M))))
    return float(np.max(np.abs(np.linalg.eigvals(M))))


def abar_matrix(A, pair: EigenPair) -> np.ndarray:
    """``diag(x^[-(m-2)/2]) A x^{m-2} diag(x^[-(m-2)/2])`` for a symmetric tensor.

    ``x^[m/2]`` is its Perron vector with eigenvalue ``lam``.
    """
    _check_pair(pair)
    A = _tensor(A)
    if not A.is_symmetric():
        raise DiagnosticError("the reduced matrix is only defined for symmetric tensors")
    m = A.order
    x = np.asarray(pair.x)
    w = x ** (-(m - 2) / 2)
    return w[:, None] * contract_to_matrix(A, x) * w[None, :]


def qlinear_rate(trace: IterationTrace, lambda_final: float, floor: float = 1e-14) -> np.ndarray:
    """Ratios ``(lam_final - lam_{k+1}) / (lam_final - lam_k)``.

    Only steps where both errors exceed ``floor`` in magnitude are used, so
    the tail lost in rounding noise does not enter.  Errors are signed: a
    sequence that crosses ``lam_final`` gives a negative ratio.
    """
    lam = np.asarray(trace.lambdas, dtype=np.float64)
    err = lambda_final - lam
    big = np.abs(err) > floor
    valid = big[:-1] & big[1:]
    if np.count_nonzero(big) < 3 or not np.any(valid):
        raise DiagnosticError("trace too short: fewer than 3 iterates measurably away from the final value")
    return err[1:][valid] / err[:-1][valid]


@dataclass(frozen=True)
class SecondOrderReport:
    min_eig_neg_hessian: float
    spectral_radius_T: float
    min_eig_T: float
    W_positive_definite: bool
    Abar_eigen_residual: float | None
    kkt_residual: float
    note: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def second_order_report(A, pair: EigenPair) -> SecondOrderReport:
    """Evaluate the second-order quantities at a converged pair of the scaled tensor."""
    _check_pair(pair)
    A = _tensor(A)
    x = np.asarray(pair.x)
    symmetric = A.is_symmetric()
    notes = []
    H = hessian_f(A if symmetric else symmetrize(A), x)
    min_neg_h = float(jacobi_eigvalsh(-0.5 * (H + H.T))[0])
    T = contraction_matrix_T(A, pair)
    if symmetric:
        eig_T = jacobi_eigvalsh(0.5 * (T + T.T))
        rho_T, min_T = float(np.max(np.abs(eig_T))), float(eig_T[0])
        # W is congruent to a positive multiple of I - T.
        w_pd = bool(1.0 - eig_T[-1] > 0)
    else:
        eig_T = np.linalg.eigvals(T)
        rho_T = float(np.max(np.abs(eig_T)))
        min_T = float(np.min(eig_T.real))
        w_pd = bool(np.all((1.0 - eig_T).real > 0))
        notes.append("tensor is not symmetric: T is the non-symmetric linearization, Abar skipped")
    abar_res = None
    if symmetric:
        M = abar_matrix(A, pair)
        zbar = x ** (A.order / 2)
        abar_res = float(np.linalg.norm(M @ zbar - pair.lambda_scaled * zbar))
    return SecondOrderReport(
        min_eig_neg_hessian=min_neg_h,
        spectral_radius_T=rho_T,
        min_eig_T=min_T,
        W_positive_definite=w_pd,
        Abar_eigen_residual=abar_res,
        kkt_residual=kkt_residual(A, x),
        note="; ".join(notes),
    )


def fd_gradient(A, x, h: float = 1e-5) -> np.ndarray:
    """Central differences of ``y -> f(exp(y))`` at ``y = log x``."""
    y = np.log(np.asarray(x, dtype=np.float64))
    g = np.empty_like(y)
    for i in range(len(y)):
        e = np.zeros_like(y)
        e[i] = h
        g[i] = (f_value(A, np.exp(y + e)) - f_value(A, np.exp(y - e))) / (2 * h)
    return g


def fd_hessian(A, x, h: float = 1e-4) -> np.ndarray:
    """Central differences of :func:`grad_f` in ``y``."""
    y = np.log(np.asarray(x, dtype=np.float64))
    n = len(y)
    H = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        H[:, j] = (grad_f(A, np.exp(y + e)) - grad_f(A, np.exp(y - e))) / (2 * h)
    return H


def relative_error(a, b) -> float:
    """Max-norm error divided by ``max(1, |b|_inf)``."""
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


def isfinite_report(report: SecondOrderReport) -> bool:
    vals = [report.min_eig_neg_hessian, report.spectral_radius_T, report.min_eig_T, report.kkt_residual]
    if report.Abar_eigen_residual is not None:
        vals.append(report.Abar_eigen_residual)
    return all(math.isfinite(v) for v in vals)
