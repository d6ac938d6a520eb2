"""Multi-restart benchmark harness.

Each trial draws one random feasible start from a child generator keyed on
``(master_seed, trial)`` and runs every requested method from that same
point.  Per-method statistics follow the tables: mean iterations, CPU time
and residual over successful runs, and the success percentage.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .problems import ProblemSpec
from .solvers import ALL_METHODS, IterationTrace, Method, SolverConfig, random_feasible_point, solve
from .tensor import DenseTensor

CSV_HEADER = ("problem", "method", "iter", "cpu_s", "res", "suc_pct")


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([master_seed, trial])))


def point_hash(x: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(x, dtype=np.float64).tobytes()).hexdigest()[:16]


@dataclass
class TrialRecord:
    trial: int
    method: str
    x0_hash: str
    status: str
    iterations: int
    residual: float
    lambda_scaled: float
    lambda_original: float
    cpu_s: float


@dataclass
class MethodRow:
    method: str
    successes: int
    trials: int
    mean_iterations: float | None = None
    mean_cpu_seconds: float | None = None
    mean_residual: float | None = None
    mean_lambda_scaled: float | None = None
    mean_lambda_original: float | None = None

    @property
    def success_percent(self) -> float:
        return 100.0 * self.successes / self.trials

    @property
    def label(self) -> str:
        return Method.parse(self.method).label


@dataclass
class BenchmarkReport:
    problem: str
    params: dict
    trials: int
    master_seed: int
    rows: list[MethodRow]
    log: list[TrialRecord] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def row(self, method) -> MethodRow:
        key = Method.parse(method).value
        for r in self.rows:
            if r.method == key:
                return r
        raise KeyError(key)

    def to_dict(self) -> dict:
        d = asdict(self)
        for r, row in zip(d["rows"], self.rows):
            r["success_percent"] = row.success_percent
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "BenchmarkReport":
        rows = [MethodRow(**{k: v for k, v in r.items() if k != "success_percent"}) for r in d["rows"]]
        log = [TrialRecord(**t) for t in d.get("log", [])]
        return cls(d["problem"], dict(d["params"]), d["trials"], d["master_seed"], rows, log,
                   list(d.get("notes", [])))

    def without_timing(self) -> dict:
        """The report with every CPU-time field removed, for reproducibility checks."""
        d = self.to_dict()
        for r in d["rows"]:
            r.pop("mean_cpu_seconds")
        for t in d["log"]:
            t.pop("cpu_s")
        return d


def aggregate(method: Method, records: list[TrialRecord]) -> MethodRow:
    ok = [r for r in records if r.status == "Converged"]
    row = MethodRow(method.value, len(ok), len(records))
    if ok:
        row.mean_iterations = float(np.mean([r.iterations for r in ok]))
        row.mean_cpu_seconds = float(np.mean([r.cpu_s for r in ok]))
        row.mean_residual = float(np.mean([r.residual for r in ok]))
        row.mean_lambda_scaled = float(np.mean([r.lambda_scaled for r in ok]))
        row.mean_lambda_original = float(np.mean([r.lambda_original for r in ok]))
    return row


def _problem_tensor(problem) -> tuple[str, dict, DenseTensor]:
    if isinstance(problem, ProblemSpec):
        params = {"m": problem.m, "n": problem.n}
        if problem.id == "p5":
            params.update(delta=problem.delta, seed=problem.seed)
        return problem.label, params, problem.build()
    if isinstance(problem, tuple):
        label, tensor = problem
        return label, {"m": tensor.order, "n": tensor.dim}, tensor
    return "tensor", {"m": problem.order, "n": problem.dim}, problem


def run_trial(A: DenseTensor, trial: int, methods, master_seed: int, cfg: SolverConfig,
              keep_traces: bool = False):
    rng = trial_rng(master_seed, trial)
    x0 = random_feasible_point(rng, A.dim, A.order)
    h = point_hash(x0)
    records, traces = [], {}
    for method in methods:
        t0 = time.process_time()
        pair, trace = solve(A, x0, cfg.with_method(method))
        cpu = time.process_time() - t0
        records.append(TrialRecord(trial, method.value, h, trace.status.value, trace.iterations,
                                   pair.residual, pair.lambda_scaled, pair.lambda_original, cpu))
        if keep_traces:
            traces[method] = (pair, trace)
    return records, traces


def run_benchmark(problem, methods=ALL_METHODS, trials: int = 100, master_seed: int = 0,
                  cfg: SolverConfig | None = None, workers: int = 1) -> BenchmarkReport:
    """Run ``trials`` restarts of every method and aggregate the outcomes.

    ``problem`` is a :class:`ProblemSpec`, a ``(label, tensor)`` pair or a
    bare tensor.  ``workers > 1`` runs trials on a thread pool; results are
    reduced in trial order so the report does not depend on scheduling.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    cfg = cfg or SolverConfig()
    methods = [Method.parse(m) for m in methods]
    if not methods:
        raise ValueError("at least one method is required")
    label, params, A = _problem_tensor(problem)

    def one(t):
        return run_trial(A, t, methods, master_seed, cfg)[0]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_trial = list(pool.map(one, range(trials)))
    else:
        per_trial = [one(t) for t in range(trials)]
    log = [rec for recs in per_trial for rec in recs]
    rows = [aggregate(m, [r for r in log if r.method == m.value]) for m in methods]
    report = BenchmarkReport(label, params, trials, master_seed, rows, log)
    if isinstance(problem, ProblemSpec) and problem.id == "p4":
        report.notes.append(
            "p4 as listed (a111=a133=a211=a311=1) has spectral radius (1+sqrt(5))/2 = 1.618034; "
            "the tabulated 1.41421 = sqrt(2) and the power-method failure belong to the variant "
            "with a122=1 in place of a111=1 (problem p4v)"
        )
    return report


def collect_traces(problem, methods=ALL_METHODS, trial: int = 0, master_seed: int = 0,
                   cfg: SolverConfig | None = None) -> list[tuple[Method, IterationTrace]]:
    cfg = cfg or SolverConfig()
    methods = [Method.parse(m) for m in methods]
    _, _, A = _problem_tensor(problem)
    _, traces = run_trial(A, trial, methods, master_seed, cfg, keep_traces=True)
    return [(m, traces[m][1]) for m in methods]


def comparison_ratios(report: BenchmarkReport) -> dict[str, float | None]:
    """Improved-method iterations and CPU time as percentages of the power method.

    ``None`` marks a ratio that cannot be formed (method missing or never
    successful).  The T columns depend on hardware.
    """
    def mean(method, attr):
        try:
            row = report.row(method)
        except KeyError:
            return None
        return getattr(row, attr) if row.successes else None

    out = {}
    for key, method, attr in [("I1", Method.IMPROVED_BB1, "mean_iterations"),
                              ("I2", Method.IMPROVED_BB2, "mean_iterations"),
                              ("T1", Method.IMPROVED_BB1, "mean_cpu_seconds"),
                              ("T2", Method.IMPROVED_BB2, "mean_cpu_seconds")]:
        num, den = mean(method, attr), mean(Method.POWER, attr)
        out[key] = 100.0 * num / den if num is not None and den else None
    return out


def _fmt(value, spec):
    return "-" if value is None else format(value, spec)


def emit_report(report: BenchmarkReport, fmt: str = "table") -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in report.rows:
            w.writerow([report.problem, r.method,
                        "" if r.mean_iterations is None else repr(r.mean_iterations),
                        "" if r.mean_cpu_seconds is None else repr(r.mean_cpu_seconds),
                        "" if r.mean_residual is None else repr(r.mean_residual),
                        repr(r.success_percent)])
        return buf.getvalue()
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"Problem {report.problem}  trials={report.trials}  seed={report.master_seed}"]
    header = f"{'Alg.':<20}{'lambda*':>12}{'iter':>8}{'Cpu':>10}{'Res':>11}{'suc%':>6}"
    lines += [header, "-" * len(header)]
    for r in report.rows:
        lines.append(
            f"{r.label:<20}{_fmt(r.mean_lambda_scaled, '.5f'):>12}{_fmt(r.mean_iterations, '.1f'):>8}"
            f"{_fmt(r.mean_cpu_seconds, '.5f'):>10}{_fmt(r.mean_residual, '.3g'):>11}"
            f"{r.success_percent:>6.0f}"
        )
    ratios = comparison_ratios(report)
    present = {r.method for r in report.rows}
    if "pm" in present and present & {"imp1", "imp2"}:
        lines.append("")
        lines.append("  ".join(f"{k}={'n/a' if v is None else format(v, '.1f') + '%'}"
                               for k, v in ratios.items()) + "   (T1/T2 depend on hardware)")
    for note in report.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def emit_trace_series(traces) -> str:
    """CSV ``method,iteration,residual`` for ``(method, trace)`` pairs or bare traces."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("method", "iteration", "residual"))
    for item in traces:
        method, trace = item if isinstance(item, tuple) else (item.method, item)
        for k, res in enumerate(trace.residuals):
            w.writerow((Method.parse(method).value, k, repr(res)))
    return buf.getvalue()
