"""The log-domain objective ``f(y) = -log(A x^m)`` with ``x = exp(y)`` and its derivatives.

The closed forms for the gradient and Hessian use ``A x^{m-1}`` and
``A x^{m-2}`` directly and so are exact derivatives only for symmetric
tensors.  ``f`` itself does not change under symmetrization, so callers
wanting true derivatives of a general tensor pass ``symmetrize(A)``.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .tensor import DenseTensor, TensorError, contract_to_matrix, contract_to_vector


def _tensor(A) -> DenseTensor:
    return getattr(A, "tensor", A)


def symmetrize(A) -> DenseTensor:
    """Average of the tensor over all permutations of its modes."""
    A = _tensor(A)
    perms = list(itertools.permutations(range(A.order)))
    acc = np.zeros_like(A.data)
    for p in perms:
        acc += np.transpose(A.data, p)
    return DenseTensor(acc / len(perms))


def f_value(A, x) -> float:
    A = _tensor(A)
    phi = float(np.dot(x, contract_to_vector(A, x)))
    if not phi > 0:
        raise TensorError(f"A x^m = {phi} is not positive; the tensor may be reducible")
    return -math.log(phi)


def grad_f(A, x) -> np.ndarray:
    """``-m (A x^{m-1} o x) / A x^m``; its components always sum to ``-m``."""
    A = _tensor(A)
    v = contract_to_vector(A, x)
    return -A.order * (v * x) / np.dot(x, v)


def partial_jacobian(A, x) -> np.ndarray:
    """Jacobian of ``x -> A x^{m-1}``; equals ``(m-1) A x^{m-2}`` for symmetric A."""
    A = _tensor(A)
    m = A.order
    J = np.zeros((A.dim, A.dim))
    for axis in range(1, m):
        t = np.moveaxis(A.data, axis, 1)
        for _ in range(m - 2):
            t = t @ x
        J += t
    return J


def b_matrix(A, x) -> np.ndarray:
    """``B(x) = (m/phi) v v^T - (m-1) A x^{m-2} - diag(v / x)`` with ``v = A x^{m-1}``.

    For a non-symmetric tensor the two middle terms are replaced by their
    exact counterparts, ``v grad(phi)^T / phi`` and the Jacobian of ``v``,
    so that ``B`` still linearizes the power-like map.
    """
    A = _tensor(A)
    m = A.order
    x = np.asarray(x, dtype=np.float64)
    v = contract_to_vector(A, x)
    phi = float(np.dot(x, v))
    if A.is_symmetric():
        grad_phi = m * v
        J = (m - 1) * contract_to_matrix(A, x)
    else:
        grad_phi = m * contract_to_vector(symmetrize(A), x)
        J = partial_jacobian(A, x)
    return np.outer(v, grad_phi) / phi - J - np.diag(v / x)


def hessian_f(A, x) -> np.ndarray:
    """``(m / phi) diag(x) B(x) diag(x)``, the Hessian of ``f`` for symmetric A."""
    A = _tensor(A)
    x = np.asarray(x, dtype=np.float64)
    phi = float(np.dot(x, contract_to_vector(A, x)))
    return A.order / phi * (x[:, None] * b_matrix(A, x) * x[None, :])
