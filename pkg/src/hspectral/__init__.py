"""Spectral radius and Perron vector of nonnegative irreducible tensors.

The solvers compute the largest H-eigenvalue ``lam`` and positive vector
``x`` with ``A x^{m-1} = lam x^[m-1]`` and ``sum(x**m) = 1``.
"""

from .bench import BenchmarkReport, comparison_ratios, emit_report, emit_trace_series, run_benchmark
from .diagnostics import SecondOrderReport, qlinear_rate, second_order_report
from .problems import ProblemSpec, problem1, problem2, problem3, problem4, problem4_variant, problem5, problem6
from .solvers import (
    EigenPair,
    IterationTrace,
    Method,
    SolverConfig,
    Status,
    power_like_step,
    power_method_step,
    random_feasible_point,
    residual_map,
    solve,
)
from .tensor import (
    DenseTensor,
    TensorError,
    contract_to_matrix,
    contract_to_scalar,
    contract_to_vector,
    is_irreducible,
    new_dense,
    read_tensor,
    scale_by_max,
    write_tensor,
)

__version__ = "0.1.0"
