"""Iterative methods for the Perron pair of a nonnegative irreducible tensor.

All methods work on the tensor scaled by its largest entry and iterate on
the unit m-norm sphere.  The power-like step takes

    x+ = ((A x^{m-1} o x) / A x^m)^[1/m]

which, for a symmetric tensor, increases ``A x^m`` monotonically.  The
improved variants move further along the same direction in ``z = x^[m]``
coordinates, with a backtracking line search whose first trial step comes
from a Barzilai-Borwein ratio.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .tensor import (
    DenseTensor,
    ScaledTensor,
    TensorError,
    check_feasible,
    contract_to_vector,
    scale_by_max,
)


class StepError(ArithmeticError):
    """A step is undefined at the current point (zero or non-finite components)."""


class Method(enum.Enum):
    POWER = "pm"
    POWER_LIKE = "plm"
    IMPROVED_BB1 = "imp1"
    IMPROVED_BB2 = "imp2"

    @property
    def label(self) -> str:
        return _LABELS[self]

    @property
    def improved(self) -> bool:
        return self in (Method.IMPROVED_BB1, Method.IMPROVED_BB2)

    @classmethod
    def parse(cls, value) -> "Method":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for method in cls:
            if key in (method.value, method.name.lower(), _LABELS[method].lower()):
                return method
        raise ValueError(f"unknown method {value!r}; expected one of pm, plm, imp1, imp2")


_LABELS = {
    Method.POWER: "Power method",
    Method.POWER_LIKE: "Power-like method",
    Method.IMPROVED_BB1: "Improved method1",
    Method.IMPROVED_BB2: "Improved method2",
}

ALL_METHODS = tuple(Method)

ARMIJO_MODES = ("auto", "monotone", "nonmonotone", "never")


@dataclass(frozen=True)
class SolverConfig:
    method: Method = Method.POWER_LIKE
    tol: float = 1e-8
    max_iter: int = 200
    sigma: float = 1e-4
    rho: float = 0.5
    delta_floor: float = 0.01
    beta_max: float = 100.0
    max_backtracks: int = 30
    # Sufficient-decrease test of the improved methods: "monotone" compares
    # with f(y_k), "nonmonotone" with the largest f over the last ``memory``
    # iterates, "never" skips it.  "auto" is monotone for symmetric tensors
    # and nonmonotone otherwise.
    armijo: str = "auto"
    memory: int = 5

    def __post_init__(self):
        object.__setattr__(self, "method", Method.parse(self.method))
        if self.armijo not in ARMIJO_MODES:
            raise ValueError(f"armijo must be one of {ARMIJO_MODES}, got {self.armijo!r}")
        if self.memory < 1:
            raise ValueError(f"memory must be >= 1, got {self.memory}")
        for name in ("sigma", "rho", "delta_floor"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {value}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.beta_max < 0:
            raise ValueError(f"beta_max must be >= 0, got {self.beta_max}")
        if self.max_backtracks < 1:
            raise ValueError(f"max_backtracks must be >= 1, got {self.max_backtracks}")

    def with_method(self, method) -> "SolverConfig":
        return SolverConfig(**{**self.__dict__, "method": Method.parse(method)})


class Status(enum.Enum):
    CONVERGED = "Converged"
    MAX_ITER = "MaxIter"


@dataclass
class IterationTrace:
    """History of one run.

    ``lambdas``, ``residuals`` and ``fvals`` hold one value per visited
    iterate ``x_0 .. x_K``; ``alphas`` and ``betas`` hold one value per step,
    so entry ``k`` describes the move from ``x_k`` to ``x_{k+1}``.
    """

    method: Method
    lambdas: list[float] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)
    fvals: list[float] = field(default_factory=list)
    alphas: list[float] = field(default_factory=list)
    betas: list[float | None] = field(default_factory=list)
    status: Status = Status.MAX_ITER
    notes: list[str] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.alphas)

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    def records(self):
        """Yield ``(k, lambda_k, res_k, alpha_k, beta_k, f_k)`` per iterate."""
        for k, (lam, res, fv) in enumerate(zip(self.lambdas, self.residuals, self.fvals)):
            alpha = self.alphas[k] if k < len(self.alphas) else None
            beta = self.betas[k] if k < len(self.betas) else None
            yield k, lam, res, alpha, beta, fv

    def to_dict(self, *, problem: str | None = None, seed: int | None = None,
                lambda_scaled: float | None = None, lambda_original: float | None = None) -> dict:
        return {
            "method": self.method.value,
            "problem": problem,
            "seed": seed,
            "status": self.status.value,
            "lambda_scaled": lambda_scaled,
            "lambda_original": lambda_original,
            "iterations": self.iterations,
            "residuals": list(self.residuals),
            "lambdas": list(self.lambdas),
            "alphas": list(self.alphas),
            "betas": list(self.betas),
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class EigenPair:
    lambda_scaled: float
    lambda_original: float
    x: np.ndarray
    residual: float


def _tensor(A) -> DenseTensor:
    return A.tensor if isinstance(A, ScaledTensor) else A


def _eval(A: DenseTensor, x: np.ndarray):
    v = contract_to_vector(A, x)
    lam = float(np.dot(x, v))
    if not lam > 0 or not math.isfinite(lam):
        raise StepError(f"A x^m = {lam} at the current point; the tensor may be reducible")
    return v, lam


def _residual(v, lam, x, m):
    F = lam * x ** (m - 1) - v
    return F, float(np.linalg.norm(F))


def residual_map(A, x) -> tuple[np.ndarray, float]:
    """``F(x) = -A x^{m-1} + (A x^m) x^[m-1]`` and its Euclidean norm."""
    A = _tensor(A)
    x = np.asarray(x, dtype=np.float64)
    v = contract_to_vector(A, x)
    return _residual(v, float(np.dot(x, v)), x, A.order)


def _from_z(z: np.ndarray, m: int) -> np.ndarray:
    # z is x^[m] up to rounding; dividing by its sum restores unit m-norm.
    return (z / z.sum()) ** (1.0 / m)


def power_like_step(A, x) -> np.ndarray:
    A = _tensor(A)
    x = np.asarray(x, dtype=np.float64)
    v, lam = _eval(A, x)
    return _from_z(v * x / lam, A.order)


def power_method_step(A, x) -> np.ndarray:
    """Higher-order power step ``(A x^{m-1})^[1/(m-1)]`` normalized in the m-norm."""
    A = _tensor(A)
    x = np.asarray(x, dtype=np.float64)
    return _power_update(contract_to_vector(A, x), A.order)


def _power_update(v: np.ndarray, m: int) -> np.ndarray:
    if np.any(v <= 0) or not np.all(np.isfinite(v)):
        raise StepError("A x^{m-1} has a zero component; the power step is undefined")
    y = v ** (1.0 / (m - 1))
    return y / np.sum(y**m) ** (1.0 / m)


@dataclass(frozen=True)
class LineSearchResult:
    alpha: float
    x: np.ndarray
    backtracks: int
    fallback: bool


def _line_search(A: DenseTensor, x, v, lam, beta, cfg: SolverConfig, f_ref: float | None) -> LineSearchResult:
    """Backtrack over ``alpha = 1 + beta rho^i``; ``f_ref=None`` skips the decrease test."""
    m = A.order
    z = x**m
    zbar = v * x / lam
    d = zbar - z
    if beta > 0:
        y = np.log(x)
        g = -m * zbar
        for i in range(cfg.max_backtracks):
            alpha = 1.0 + beta * cfg.rho**i
            za = zbar + (alpha - 1.0) * d
            if np.any(za < cfg.delta_floor * zbar):
                continue
            xa = _from_z(za, m)
            if f_ref is None:
                return LineSearchResult(alpha, xa, i, False)
            lam_a = float(np.dot(xa, contract_to_vector(A, xa)))
            if not lam_a > 0:
                continue
            slope = float(np.dot(alpha * g + (alpha - 1.0) * m * z, np.log(xa) - y))
            if -math.log(lam_a) <= f_ref + cfg.sigma * slope:
                return LineSearchResult(alpha, xa, i, False)
    return LineSearchResult(1.0, _from_z(zbar, m), cfg.max_backtracks if beta > 0 else 0, beta > 0)


def _decrease_mode(A: DenseTensor, cfg: SolverConfig) -> str:
    if cfg.armijo == "auto":
        return "monotone" if A.is_symmetric() else "nonmonotone"
    return cfg.armijo


def _reference_f(mode: str, fvals: list[float], memory: int) -> float | None:
    if mode == "never":
        return None
    if mode == "monotone":
        return fvals[-1]
    return max(fvals[-memory:])


def line_search(A, x, beta: float, cfg: SolverConfig | None = None,
                history: list[float] | None = None) -> tuple[float, np.ndarray]:
    """Largest ``alpha = 1 + beta rho^i`` passing the floor and sufficient-decrease tests.

    The floor test is ``x^[m](alpha) >= delta_floor * xbar^[m]``.  The
    sufficient-decrease test on ``f`` follows ``cfg.armijo``; ``history``
    holds earlier values of ``f`` for the nonmonotone reference (the value
    at ``x`` is appended).  Falls back to ``alpha = 1`` (the power-like
    step) when no candidate passes within ``cfg.max_backtracks`` trials.
    """
    cfg = cfg or SolverConfig()
    A = _tensor(A)
    x = np.asarray(x, dtype=np.float64)
    v, lam = _eval(A, x)
    fvals = list(history or []) + [-math.log(lam)]
    f_ref = _reference_f(_decrease_mode(A, cfg), fvals, cfg.memory)
    res = _line_search(A, x, v, lam, beta, cfg, f_ref)
    return res.alpha, res.x


def bb_step(z, z_prev, G, G_prev, lam: float, x, variant: str = "BB1", beta_max: float = 100.0) -> float:
    """Secant estimate of the extra step ``beta``, clamped to ``[0, beta_max]``.

    BB1: ``lam * t'Ds / |Dt|^2 - 1``; BB2: ``lam * t's / t'Dt - 1`` with
    ``s = z - z_prev``, ``t = G - G_prev`` and ``D = diag(x)``.  Negative or
    degenerate values map to 0.
    """
    s = np.asarray(z) - np.asarray(z_prev)
    t = np.asarray(G) - np.asarray(G_prev)
    x = np.asarray(x)
    variant = variant.upper()
    if variant == "BB1":
        Dt = x * t
        num, den = float(np.dot(Dt, s)), float(np.dot(Dt, Dt))
    elif variant == "BB2":
        num, den = float(np.dot(t, s)), float(np.dot(t, x * t))
    else:
        raise ValueError(f"unknown BB variant {variant!r}")
    if not den > 1e-300:
        return 0.0
    raw = lam * num / den - 1.0
    if not math.isfinite(raw) or raw < 0:
        return 0.0
    return min(raw, beta_max)


def random_feasible_point(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    """Uniform(0, 1) components redrawn below 1e-8, then m-norm normalized."""
    x = rng.random(n)
    while np.any(x < 1e-8):
        bad = x < 1e-8
        x[bad] = rng.random(int(bad.sum()))
    return x / np.sum(x**m) ** (1.0 / m)


def solve(A, x0, cfg: SolverConfig | None = None) -> tuple[EigenPair, IterationTrace]:
    """Run one method from ``x0`` until ``Res <= tol`` or ``max_iter`` steps.

    ``A`` is scaled by its largest entry first; the returned pair carries
    both the scaled eigenvalue and the eigenvalue of ``A`` itself.
    """
    cfg = cfg or SolverConfig()
    A = _tensor(A)
    scaled = scale_by_max(A)
    Ab, m = scaled.tensor, A.order
    x = check_feasible(x0, m).copy()
    if x.shape != (A.dim,):
        raise TensorError(f"initial point has length {len(x)}, expected {A.dim}")

    method = cfg.method
    mode = _decrease_mode(Ab, cfg) if method.improved else "never"
    trace = IterationTrace(method)
    variant = "BB1" if method is Method.IMPROVED_BB1 else "BB2"
    prev = None  # (z, G) at the previous iterate
    lam = res = float("nan")
    for k in range(cfg.max_iter + 1):
        try:
            v, lam = _eval(Ab, x)
        except StepError as exc:
            trace.notes.append(f"failed at k={k}: {exc}")
            break
        F, res = _residual(v, lam, x, m)
        trace.lambdas.append(lam)
        trace.residuals.append(res)
        trace.fvals.append(-math.log(lam))
        if res <= cfg.tol:
            trace.status = Status.CONVERGED
            break
        if k == cfg.max_iter:
            break
        try:
            if method is Method.POWER:
                x_new, alpha, beta = _power_update(v, m), 1.0, None
            elif method is Method.POWER_LIKE:
                x_new, alpha, beta = _from_z(v * x / lam, m), 1.0, None
            else:
                z = x**m
                beta = 0.0 if prev is None else bb_step(z, prev[0], F, prev[1], lam, x, variant, cfg.beta_max)
                prev = (z, F)
                f_ref = _reference_f(mode, trace.fvals, cfg.memory)
                ls = _line_search(Ab, x, v, lam, beta, cfg, f_ref)
                x_new, alpha = ls.x, ls.alpha
        except StepError as exc:
            trace.notes.append(f"failed at k={k}: {exc}")
            break
        if np.array_equal(x_new, x):
            trace.notes.append(f"stagnated at k={k}: iterate unchanged before reaching tol")
            break
        trace.alphas.append(alpha)
        trace.betas.append(beta)
        x = x_new

    pair = EigenPair(lam, scaled.scale * lam, x, res)
    return pair, trace


def trace_json(trace: IterationTrace, pair: EigenPair, *, problem: str | None = None,
               seed: int | None = None) -> str:
    return json.dumps(trace.to_dict(problem=problem, seed=seed, lambda_scaled=pair.lambda_scaled,
                                    lambda_original=pair.lambda_original))
