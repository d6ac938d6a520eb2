"""``bench`` command: multi-restart runs of the eigenvalue methods on a benchmark tensor."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import collect_traces, emit_report, emit_trace_series, run_benchmark, trial_rng
from .diagnostics import DiagnosticError, second_order_report
from .problems import PROBLEM_IDS, ProblemSpec
from .solvers import ARMIJO_MODES, Method, SolverConfig, random_feasible_point, solve
from .tensor import DENSE_CAP, TensorError, read_tensor, scale_by_max, write_tensor

# Without --full, generated problems are shrunk to at most this many entries.
DESK_ENTRIES = 4 * 10**6


class ConfigError(ValueError):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bench",
        description="Spectral radius of nonnegative tensors: power, power-like and improved methods.",
    )
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--problem", choices=PROBLEM_IDS, help="benchmark problem")
    src.add_argument("--tensor-file", type=Path, help="tensor in the text format ('m n' header, 'i1 .. im value' lines)")
    p.add_argument("--m", type=int, help="order (p5, p6)")
    p.add_argument("--n", type=int, help="dimension (p5, p6)")
    p.add_argument("--delta", type=float, default=0.0, help="identity shift for p5")
    p.add_argument("--tensor-seed", type=int, help="seed of the p5 entries (default: --seed)")
    p.add_argument("--methods", default="pm,plm,imp1,imp2", help="comma-separated subset of pm,plm,imp1,imp2")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0, help="master seed for the initial points")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--armijo", choices=ARMIJO_MODES, default="auto",
                   help="sufficient-decrease test of the improved methods "
                        "(auto: monotone for symmetric tensors, nonmonotone otherwise)")
    p.add_argument("--workers", type=int, default=1, help="threads for running trials")
    p.add_argument("--diagnose", action="store_true", help="append second-order diagnostics of trial 0")
    p.add_argument("--traces", type=Path, help="write the residual series of trial 0 as CSV")
    p.add_argument("--export-tensor", type=Path, help="write the problem tensor in the text format")
    p.add_argument("--full", action="store_true",
                   help=f"run p5/p6 at the requested size even above {DESK_ENTRIES:.0e} entries")
    return p


def _problem_from_args(args, warn):
    if args.tensor_file is not None:
        if any(v is not None for v in (args.m, args.n)):
            raise ConfigError("--m/--n cannot be combined with --tensor-file")
        tensor = read_tensor(args.tensor_file)
        return (args.tensor_file.name, tensor), tensor
    m, n = args.m, args.n
    if args.problem in ("p5", "p6") and m is not None and n is not None:
        if n**m > DENSE_CAP:
            raise ConfigError(
                f"{args.problem} with m={m}, n={n} has {n**m:.3g} entries, above the dense cap "
                f"{DENSE_CAP:.0e}; try n <= {int(DENSE_CAP ** (1 / m))}"
            )
        if n**m > DESK_ENTRIES and not args.full:
            reduced = int(DESK_ENTRIES ** (1 / m) + 1e-9)
            warn(f"reducing n from {n} to {reduced} (order {m}); pass --full for the requested size")
            n = reduced
    seed = args.seed if args.tensor_seed is None else args.tensor_seed
    spec = ProblemSpec(args.problem, m, n, delta=args.delta, seed=seed)
    return spec, spec.build()


def _diagnostics(tensor, methods, args, cfg) -> dict:
    scaled = scale_by_max(tensor).tensor
    x0 = random_feasible_point(trial_rng(args.seed, 0), tensor.dim, tensor.order)
    out = {}
    for method in methods:
        pair, _ = solve(tensor, x0, cfg.with_method(method))
        try:
            out[method.value] = second_order_report(scaled, pair).to_dict()
        except DiagnosticError as exc:
            out[method.value] = {"error": str(exc)}
    return out


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)

    def warn(msg):
        print(f"bench: {msg}", file=stderr)

    try:
        methods = [Method.parse(s) for s in args.methods.split(",") if s.strip()]
        if not methods:
            raise ConfigError("--methods is empty")
        if len(set(methods)) != len(methods):
            raise ConfigError("--methods lists a method twice")
        if args.trials < 1:
            raise ConfigError("--trials must be >= 1")
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        cfg = SolverConfig(tol=args.tol, max_iter=args.max_iter, armijo=args.armijo)
        problem, tensor = _problem_from_args(args, warn)
    except (ValueError, TensorError, OSError) as exc:
        warn(f"configuration error: {exc}")
        return 2

    if args.export_tensor is not None:
        write_tensor(tensor, args.export_tensor)
    report = run_benchmark(problem, methods, args.trials, args.seed, cfg, workers=args.workers)
    diag = _diagnostics(tensor, methods, args, cfg) if args.diagnose else None

    if args.format == "json":
        d = report.to_dict()
        if diag is not None:
            d["diagnostics"] = diag
        stdout.write(json.dumps(d, indent=2) + "\n")
    else:
        stdout.write(emit_report(report, args.format))
        if diag is not None:
            stdout.write("# diagnostics (trial 0)\n" + json.dumps(diag, indent=2) + "\n")

    if args.traces is not None:
        traces = collect_traces(problem, methods, trial=0, master_seed=args.seed, cfg=cfg)
        args.traces.write_text(emit_trace_series(traces))
    return 0


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
