"""The six benchmark tensors.

Problems 1-4 are fixed small tensors; problem 5 is a random tensor plus a
multiple of the identity and problem 6 is a deterministic symmetric family.
Random entries for problem 5 come from numpy's Philox-4x64 counter-based
generator seeded directly with the user seed, so an instance is fully
determined by ``(m, n, delta, seed)`` on every platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .tensor import DenseTensor, check_size, new_dense

PROBLEM_IDS = ("p1", "p2", "p3", "p4", "p4v", "p5", "p6")

# Spectral radius of the tensor scaled by its largest entry.  p1-p3 and p4v
# are the tabulated values; the tabulated 1.41421 for p4 is sqrt(2), which
# belongs to the variant p4v, while p4 as listed has (1 + sqrt(5)) / 2.
REFERENCE_LAMBDA_SCALED = {
    "p1": 2.73205,
    "p2": 4.45951,
    "p3": 1.10824,
    "p4": 1.61803,
    "p4v": 1.41421,
}

FIXED_SHAPES = {"p1": (4, 2), "p2": (3, 3), "p3": (4, 2), "p4": (3, 3), "p4v": (3, 3)}


def problem1() -> DenseTensor:
    d = 4 / math.sqrt(3)
    entries = {(1, 1, 1, 1): d, (2, 2, 2, 2): d}
    for idx in [(1, 1, 1, 2), (1, 1, 2, 1), (1, 2, 1, 1), (2, 1, 1, 1),
                (1, 2, 2, 2), (2, 1, 2, 2), (2, 2, 1, 2), (2, 2, 2, 1)]:
        entries[idx] = 1.0
    return new_dense(4, 2, entries)


_P2_SLICES = (
    ((6.48, 8.35, 1.03), (4.04, 3.72, 1.43), (6.61, 6.41, 1.35)),
    ((9.02, 0.78, 6.90), (9.70, 4.79, 1.85), (2.09, 4.17, 2.98)),
    ((9.55, 1.57, 6.89), (5.63, 5.55, 1.45), (5.65, 8.29, 6.22)),
)


def problem2() -> DenseTensor:
    # a_{ijk} = A(i, :, :)[j, k]
    return DenseTensor(np.array(_P2_SLICES))


def problem3() -> DenseTensor:
    return new_dense(4, 2, {
        (1, 1, 1, 2): 30.0,
        (1, 2, 1, 2): 1.0,
        (1, 2, 2, 2): 1.0,
        (2, 1, 1, 1): 6.0,
        (2, 1, 1, 2): 13.0,
        (2, 1, 2, 2): 37.0,
    })


def problem4() -> DenseTensor:
    return new_dense(3, 3, {(1, 1, 1): 1.0, (1, 3, 3): 1.0, (2, 1, 1): 1.0, (3, 1, 1): 1.0})


def problem4_variant() -> DenseTensor:
    """Problem 4 with ``a_122 = 1`` in place of ``a_111 = 1``.

    The tabulated eigenvalue 1.41421 = sqrt(2) belongs to this tensor; the
    tensor as listed has spectral radius (1 + sqrt(5)) / 2.
    """
    return new_dense(3, 3, {(1, 2, 2): 1.0, (1, 3, 3): 1.0, (2, 1, 1): 1.0, (3, 1, 1): 1.0})


def problem5(m: int, n: int, delta: float, seed: int) -> DenseTensor:
    """Uniform[0, 1] random tensor plus ``delta`` times the identity."""
    check_size(m, n)
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    rng = np.random.Generator(np.random.Philox(seed))
    data = rng.random((n,) * m)
    data[(np.arange(n),) * m] += delta
    return DenseTensor(data)


def problem6(m: int, n: int) -> DenseTensor:
    """Entries ``|tan(i1) + ... + tan(im)|`` with 1-based indices in radians."""
    check_size(m, n)
    t = np.tan(np.arange(1, n + 1, dtype=np.float64))
    data = t
    for _ in range(m - 1):
        data = np.add.outer(data, t)
    return DenseTensor(np.abs(data))


@dataclass(frozen=True)
class ProblemSpec:
    id: str
    m: int | None = None
    n: int | None = None
    delta: float = 0.0
    seed: int = 0
    reference_lambda_scaled: float | None = field(default=None)

    def __post_init__(self):
        pid = self.id.lower()
        if pid not in PROBLEM_IDS:
            raise ValueError(f"unknown problem {self.id!r}; expected one of {PROBLEM_IDS}")
        object.__setattr__(self, "id", pid)
        if pid in FIXED_SHAPES:
            m, n = FIXED_SHAPES[pid]
            if (self.m, self.n) not in ((None, None), (m, n)):
                raise ValueError(f"{pid} has fixed shape (m, n) = ({m}, {n})")
            object.__setattr__(self, "m", m)
            object.__setattr__(self, "n", n)
            object.__setattr__(self, "reference_lambda_scaled", REFERENCE_LAMBDA_SCALED[pid])
        else:
            if self.m is None or self.n is None:
                raise ValueError(f"{pid} requires m and n")
            if pid == "p5" and self.delta <= 0:
                raise ValueError("p5 requires delta > 0")
            check_size(self.m, self.n)

    @property
    def label(self) -> str:
        if self.id == "p5":
            return f"p5({self.m},{self.n},{self.delta:g})"
        if self.id == "p6":
            return f"p6({self.m},{self.n})"
        return self.id

    def build(self) -> DenseTensor:
        if self.id == "p5":
            return problem5(self.m, self.n, self.delta, self.seed)
        if self.id == "p6":
            return problem6(self.m, self.n)
        return {"p1": problem1, "p2": problem2, "p3": problem3, "p4": problem4,
                "p4v": problem4_variant}[self.id]()


__all__ = [
    "PROBLEM_IDS",
    "REFERENCE_LAMBDA_SCALED",
    "ProblemSpec",
    "problem1",
    "problem2",
    "problem3",
    "problem4",
    "problem4_variant",
    "problem5",
    "problem6",
]
