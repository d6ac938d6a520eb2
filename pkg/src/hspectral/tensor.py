"""Dense nonnegative tensors and the multilinear contractions used by the solvers.

A tensor of order ``m`` and dimension ``n`` is stored as a read-only numpy
array of shape ``(n,) * m``.  The flat layout is row-major with the first
index slowest, which is also the order used by the text format.
"""

from __future__ import annotations

import enum
import io
import os
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

# Largest number of dense entries any constructor will allocate.
DENSE_CAP = 10**8

# Exact subset enumeration is used for irreducibility up to this dimension.
EXACT_IRREDUCIBLE_MAX_DIM = 16

FEASIBLE_TOL = 1e-12


class TensorError(ValueError):
    """Raised for malformed tensors, bad indices and infeasible points."""


class DenseTensor:
    """Order-``m``, dimension-``n`` real tensor with nonnegative entries."""

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.array(data, dtype=np.float64)
        if arr.ndim < 2:
            raise TensorError(f"tensor order must be >= 2, got {arr.ndim}")
        n = arr.shape[0]
        if n < 1 or any(s != n for s in arr.shape):
            raise TensorError(f"tensor must be cubical, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise TensorError("tensor entries must be finite")
        if np.any(arr < 0):
            raise TensorError("tensor entries must be nonnegative")
        arr.setflags(write=False)
        self.data = arr

    @property
    def order(self) -> int:
        return self.data.ndim

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def entries(self) -> np.ndarray:
        """Flat view in row-major multi-index order."""
        return self.data.reshape(-1)

    def __getitem__(self, index: Sequence[int]) -> float:
        """Entry at a 1-based multi-index."""
        if len(index) != self.order:
            raise TensorError(f"expected {self.order} indices, got {len(index)}")
        return float(self.data[tuple(i - 1 for i in index)])

    def __eq__(self, other):
        if not isinstance(other, DenseTensor):
            return NotImplemented
        return self.data.shape == other.data.shape and np.array_equal(self.data, other.data)

    def __repr__(self):
        return f"DenseTensor(order={self.order}, dim={self.dim}, nnz={np.count_nonzero(self.data)})"

    def nonzeros(self):
        """Yield ``(multi_index, value)`` pairs with 1-based indices."""
        for idx in zip(*np.nonzero(self.data)):
            yield tuple(int(i) + 1 for i in idx), float(self.data[idx])

    def is_symmetric(self, rtol: float = 1e-12) -> bool:
        """True when every mode permutation leaves the tensor unchanged.

        Entries may differ by ``rtol`` times the largest entry, so tensors
        built from sums evaluated in different orders still count; pass
        ``rtol=0`` for bitwise symmetry.  Adjacent transpositions generate
        all permutations, so ``m - 1`` comparisons suffice.
        """
        a = self.data
        atol = rtol * float(np.abs(a).max(initial=0.0))
        for k in range(self.order - 1):
            if not np.allclose(a, np.swapaxes(a, k, k + 1), rtol=0.0, atol=atol):
                return False
        return True

    def permuted(self, perm: Sequence[int]) -> "DenseTensor":
        """Relabel indices simultaneously in all modes (``perm`` is 0-based)."""
        p = np.asarray(perm)
        a = self.data
        for axis in range(self.order):
            a = np.take(a, p, axis=axis)
        return DenseTensor(a)


@dataclass(frozen=True)
class ScaledTensor:
    """The tensor divided by its largest entry, plus that entry."""

    tensor: DenseTensor
    scale: float


def check_size(order: int, dim: int, cap: int = DENSE_CAP) -> None:
    if order < 2:
        raise TensorError(f"order must be >= 2, got {order}")
    if dim < 1:
        raise TensorError(f"dimension must be >= 1, got {dim}")
    if dim**order > cap:
        raise TensorError(
            f"dense tensor with n^m = {dim}^{order} entries exceeds the cap of {cap}; "
            "use a smaller order or dimension"
        )


def new_dense(order: int, dim: int, nonzeros: Iterable | Mapping = ()) -> DenseTensor:
    """Build a tensor from ``(multi_index, value)`` pairs with 1-based indices.

    Unlisted entries are zero.  Negative values, out-of-range indices and
    repeated index tuples raise :class:`TensorError`.
    """
    check_size(order, dim)
    if isinstance(nonzeros, Mapping):
        nonzeros = nonzeros.items()
    data = np.zeros((dim,) * order)
    seen = set()
    for index, value in nonzeros:
        index = tuple(int(i) for i in index)
        if len(index) != order:
            raise TensorError(f"index {index} does not have {order} components")
        if any(i < 1 or i > dim for i in index):
            raise TensorError(f"index {index} out of range [1, {dim}]")
        if index in seen:
            raise TensorError(f"duplicate index {index}")
        value = float(value)
        if not np.isfinite(value) or value < 0:
            raise TensorError(f"entry {index} = {value} is not a nonnegative finite number")
        seen.add(index)
        data[tuple(i - 1 for i in index)] = value
    return DenseTensor(data)


def identity_tensor(m: int, n: int) -> DenseTensor:
    check_size(m, n)
    data = np.zeros((n,) * m)
    data[(np.arange(n),) * m] = 1.0
    return DenseTensor(data)


def _as_vector(A: DenseTensor, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (A.dim,):
        raise TensorError(f"vector of shape {x.shape} does not match dimension {A.dim}")
    return x


def contract_to_vector(A: DenseTensor, x) -> np.ndarray:
    """``A x^{m-1}``: contract every mode but the first with ``x``."""
    x = _as_vector(A, x)
    t = A.data
    for _ in range(A.order - 1):
        t = t @ x
    return t


def contract_to_matrix(A: DenseTensor, x) -> np.ndarray:
    """``A x^{m-2}``: contract every mode but the first two with ``x``."""
    x = _as_vector(A, x)
    t = A.data
    for _ in range(A.order - 2):
        t = t @ x
    return np.array(t)


def contract_to_scalar(A: DenseTensor, x) -> float:
    """``A x^m = <x, A x^{m-1}>``."""
    x = _as_vector(A, x)
    return float(x @ contract_to_vector(A, x))


def scale_by_max(A: DenseTensor) -> ScaledTensor:
    a = float(A.data.max())
    if a <= 0:
        raise TensorError("cannot scale an all-zero tensor")
    return ScaledTensor(DenseTensor(A.data / a), a)


def normalize_to_feasible(x, m: int) -> np.ndarray:
    """Project a positive vector onto the unit m-norm sphere."""
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise TensorError("point must have strictly positive finite components")
    return x / np.sum(x**m) ** (1.0 / m)


def check_feasible(x, m: int, tol: float = FEASIBLE_TOL) -> np.ndarray:
    """Return ``x`` as an array if it is strictly positive with unit m-norm."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise TensorError("feasible point must be a strictly positive finite vector")
    if abs(np.sum(x**m) - 1.0) > tol:
        raise TensorError(f"feasible point must satisfy sum(x**{m}) = 1, got {np.sum(x**m)!r}")
    return x


# --------------------------------------------------------------------------
# Irreducibility


class Irreducibility(enum.Enum):
    IRREDUCIBLE = "irreducible"
    REDUCIBLE = "reducible"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class IrreducibilityResult:
    status: Irreducibility
    witness: tuple[int, ...] | None = None  # 1-based index set I when reducible
    exact: bool = True

    def __bool__(self):
        return self.status is Irreducibility.IRREDUCIBLE


def _row_masks(A: DenseTensor) -> list[np.ndarray]:
    """Per row ``i``, the distinct bitmasks of index sets ``{i2..im}`` with a positive entry."""
    n, m = A.dim, A.order
    weights = np.int64(1) << np.arange(n, dtype=np.int64)
    masks = []
    for i in range(n):
        idx = np.nonzero(A.data[i])
        if len(idx[0]) == 0:
            masks.append(np.zeros(0, dtype=np.int64))
            continue
        bits = np.zeros(len(idx[0]), dtype=np.int64)
        for axis in range(m - 1):
            bits |= weights[idx[axis]]
        masks.append(np.unique(bits))
    return masks


def _irreducible_exact(A: DenseTensor) -> IrreducibilityResult:
    n = A.dim
    if n == 1:
        return IrreducibilityResult(Irreducibility.IRREDUCIBLE)
    subsets = np.arange(1, (1 << n) - 1, dtype=np.int64)
    reducible = np.ones(len(subsets), dtype=bool)
    for i, masks in enumerate(_row_masks(A)):
        contains_i = (subsets >> i) & 1 == 1
        if len(masks) == 0:
            continue
        # Row i is compatible with I when every positive tuple touches I.
        touches = np.ones(len(subsets), dtype=bool)
        for chunk in np.array_split(masks, max(1, len(masks) // 256)):
            touches &= np.all((chunk[:, None] & subsets[None, :]) != 0, axis=0)
        reducible &= ~contains_i | touches
    hits = np.nonzero(reducible)[0]
    if len(hits) == 0:
        return IrreducibilityResult(Irreducibility.IRREDUCIBLE)
    mask = int(subsets[hits[0]])
    witness = tuple(i + 1 for i in range(n) if (mask >> i) & 1)
    return IrreducibilityResult(Irreducibility.REDUCIBLE, witness)


def _irreducible_graph(A: DenseTensor) -> IrreducibilityResult:
    n, m = A.dim, A.order
    pos = A.data > 0
    # Edge i -> j when some positive entry in slice i involves j.
    any_edge = np.zeros((n, n), dtype=bool)
    for axis in range(1, m):
        others = tuple(a for a in range(1, m) if a != axis)
        any_edge |= pos.any(axis=others) if others else pos
    ncomp, labels = connected_components(csr_matrix(any_edge), directed=True, connection="strong")
    if ncomp > 1:
        # A component with no outgoing edges is closed: every positive entry in
        # its rows uses only its own indices, so it is a reducing set.
        for c in range(ncomp):
            members = labels == c
            if not any_edge[np.ix_(members, ~members)].any():
                witness = tuple(int(i) + 1 for i in np.nonzero(members)[0])
                return IrreducibilityResult(Irreducibility.REDUCIBLE, witness, exact=False)
    # Edge i -> j when a_{i j ... j} > 0.  Strong connectivity of this graph
    # rules out every reducing set.
    diag_edge = A.data[(slice(None),) + (np.arange(n),) * (m - 1)] > 0
    ncomp, _ = connected_components(csr_matrix(diag_edge), directed=True, connection="strong")
    if ncomp == 1:
        return IrreducibilityResult(Irreducibility.IRREDUCIBLE, exact=False)
    return IrreducibilityResult(Irreducibility.UNKNOWN, exact=False)


def is_irreducible(A: DenseTensor) -> IrreducibilityResult:
    """Decide irreducibility.

    Exact subset enumeration for ``n <= 16``.  Larger tensors get two graph
    certificates, one for each answer, and ``UNKNOWN`` when neither applies.
    """
    if A.dim <= EXACT_IRREDUCIBLE_MAX_DIM:
        return _irreducible_exact(A)
    return _irreducible_graph(A)


# --------------------------------------------------------------------------
# Text format: "m n" header, then "i1 ... im value" per nonzero, 1-based.


def loads(text: str) -> DenseTensor:
    lines = [ln.split() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln[0].startswith("#")]
    if not lines or len(lines[0]) != 2:
        raise TensorError("first line must be 'm n'")
    try:
        m, n = int(lines[0][0]), int(lines[0][1])
    except ValueError as exc:
        raise TensorError(f"bad header {lines[0]}") from exc
    entries = []
    for lineno, fields in enumerate(lines[1:], start=2):
        if len(fields) != m + 1:
            raise TensorError(f"line {lineno}: expected {m} indices and a value")
        try:
            index = tuple(int(f) for f in fields[:m])
            value = float(fields[m])
        except ValueError as exc:
            raise TensorError(f"line {lineno}: {exc}") from exc
        entries.append((index, value))
    return new_dense(m, n, entries)


def dumps(A: DenseTensor) -> str:
    out = io.StringIO()
    out.write(f"{A.order} {A.dim}\n")
    for index, value in A.nonzeros():
        out.write(" ".join(str(i) for i in index) + f" {value!r}\n")
    return out.getvalue()


def read_tensor(path: str | os.PathLike) -> DenseTensor:
    with open(path) as fh:
        return loads(fh.read())


def write_tensor(A: DenseTensor, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(A))
