"""``fftstencil`` command line.

Exit codes: 0 success, 1 verification or accuracy check failed, 2 bad spec
or I/O error.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from fftstencil import _backend
from fftstencil._config import get_threads, set_threads
from fftstencil.accuracy import max_relative_error, modal_problem
from fftstencil.aperiodic import solve_aperiodic
from fftstencil.grid import FieldGrid
from fftstencil.gridio import FORMATS, format_value, write_grid
from fftstencil.oracle import evolve_aperiodic_naive, evolve_periodic_naive
from fftstencil.periodic import NumericalBlowupError, solve_periodic
from fftstencil.problem import MODES, ProblemSpec, SpecError, initial_grid, load_spec
from fftstencil.stencils import BUILTIN_STENCILS, builtin_stencil
from fftstencil.timing import STAGES, Timings

__all__ = ["main", "run", "VERIFY_RTOL", "ACCURACY_RTOL"]

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2
VERIFY_RTOL = 1e-8
ACCURACY_RTOL = 1e-9


def _fft(spec: ProblemSpec, a0: FieldGrid, timings=None) -> FieldGrid:
    if spec.periodic:
        return solve_periodic(a0, spec.kernel, spec.T, timings=timings)
    return solve_aperiodic(a0, spec.kernel, spec.boundary, spec.T, spec.cutoff, timings=timings)


def _naive(spec: ProblemSpec, a0: FieldGrid) -> FieldGrid:
    if spec.periodic:
        return evolve_periodic_naive(a0, spec.kernel, spec.T)
    return evolve_aperiodic_naive(a0, spec.kernel, spec.boundary, spec.T)


def compare(result: FieldGrid, oracle: FieldGrid) -> tuple[float, float, float]:
    """Max-abs diff, max-rel diff and the pass threshold ``1e-8 * (1 + max|oracle|)``."""
    diff = np.abs(result.data - oracle.data)
    scale = np.abs(oracle.data)
    max_abs = float(diff.max())
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(scale > 0, diff / scale, np.where(diff > 0, np.inf, 0.0))
    return max_abs, float(rel.max()), VERIFY_RTOL * (1.0 + float(scale.max()))


def _write(grid: FieldGrid, spec: ProblemSpec, out, fmt, stream) -> None:
    fmt = fmt or spec.output
    if fmt == "none":
        return
    if out is None:
        if fmt == "raw":
            raise SpecError("raw output needs --out PATH")
        for cell in np.ndindex(*grid.shape.dims):
            prefix = ",".join(map(str, cell))
            for f, v in enumerate(grid.data[cell]):
                stream.write(f"{prefix},{f},{format_value(v)}\n")
        return
    write_grid(grid, out, fmt)


def _header(spec: ProblemSpec, mode: str, log) -> None:
    bc = "periodic" if spec.periodic else "dirichlet"
    print(
        f"# {mode}: kernel={spec.kernel_label} shape={list(spec.shape)} T={spec.T} "
        f"boundary={bc} backend={_backend.NAME} threads={get_threads()}",
        file=log,
    )


def _run_solve(spec, out, fmt, stream, log) -> int:
    a0 = initial_grid(spec)
    if spec.solver == "naive":
        result = _naive(spec, a0)
    else:
        result = _fft(spec, a0)
        if spec.solver == "both":
            max_abs, max_rel, _ = compare(result, _naive(spec, a0))
            print(f"# fft vs naive: max_abs={max_abs:.3e} max_rel={max_rel:.3e}", file=log)
    _write(result, spec, out, fmt, stream)
    return EXIT_OK


def _run_verify(spec, out, fmt, stream, log) -> int:
    a0 = initial_grid(spec)
    result = _fft(spec, a0)
    oracle = _naive(spec, a0)
    max_abs, max_rel, limit = compare(result, oracle)
    ok = max_abs <= limit
    print(f"max_abs_diff  {max_abs:.6e}", file=stream)
    print(f"max_rel_diff  {max_rel:.6e}", file=stream)
    print(f"threshold     {limit:.6e}", file=stream)
    print(f"verify        {'PASS' if ok else 'FAIL'}", file=stream)
    if out is not None:
        write_grid(result, out, fmt or ("csv" if spec.output == "none" else spec.output))
    return EXIT_OK if ok else EXIT_FAIL


def _run_bench(spec, out, fmt, stream, log) -> int:
    a0 = initial_grid(spec)
    rows = []
    if spec.solver in ("fft", "both"):
        timings = Timings()
        start = time.perf_counter()
        result = _fft(spec, a0, timings)
        wall = time.perf_counter() - start
        print(f"{'stage':<20}{'seconds':>12}{'share':>9}", file=stream)
        for name in STAGES:
            sec = timings.seconds[name]
            share = sec / wall if wall > 0 else 0.0
            print(f"{name:<20}{sec:>12.6f}{share:>8.1%}", file=stream)
        print(f"{'stage_sum':<20}{timings.total:>12.6f}{(timings.total / wall if wall else 0):>8.1%}", file=stream)
        print(f"{'total_wall':<20}{wall:>12.6f}", file=stream)
        rows.append(("fft", wall))
    if spec.solver in ("naive", "both"):
        start = time.perf_counter()
        naive = _naive(spec, a0)
        wall = time.perf_counter() - start
        print(f"{'naive_total':<20}{wall:>12.6f}", file=stream)
        if spec.solver == "naive":
            result = naive
    if out is not None:
        write_grid(result, out, fmt or ("csv" if spec.output == "none" else spec.output))
    return EXIT_OK


def _run_accuracy(spec, out, fmt, stream, log) -> int:
    try:
        problem = modal_problem(spec.kernel, spec.shape, spec.T, periodic=spec.periodic)
    except ValueError as exc:
        raise SpecError(f"accuracy mode: {exc}") from None
    fixed = spec if spec.periodic else ProblemSpec(
        shape=spec.shape, kernel=spec.kernel, boundary=problem.boundary, T=spec.T,
        solver=spec.solver, cutoff=spec.cutoff, kernel_label=spec.kernel_label,
    )
    err_fft = max_relative_error(_fft(fixed, problem.a0).data, problem.truth)
    err_naive = max_relative_error(_naive(fixed, problem.a0).data, problem.truth)
    gap = abs(err_fft - err_naive)
    ok = gap <= ACCURACY_RTOL * (1.0 + err_naive)
    print(f"err_fft       {err_fft:.6e}", file=stream)
    print(f"err_naive     {err_naive:.6e}", file=stream)
    print(f"gap           {gap:.6e}", file=stream)
    print(f"parity        {'PASS' if ok else 'FAIL'}", file=stream)
    return EXIT_OK if ok else EXIT_FAIL


_RUNNERS = {
    "solve": _run_solve,
    "verify": _run_verify,
    "bench": _run_bench,
    "accuracy": _run_accuracy,
}


def run(spec: ProblemSpec, mode: str | None = None, out=None, fmt=None,
        stream=None, log=None) -> int:
    """Execute ``spec`` in ``mode`` (default ``spec.mode``) and return the exit code."""
    stream = stream or sys.stdout
    log = log or sys.stderr
    mode = mode or spec.mode
    _header(spec, mode, log)
    try:
        return _RUNNERS[mode](spec, out, fmt, stream, log)
    except SpecError as exc:
        print(f"error: {exc}", file=log)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=log)
        return EXIT_ERROR
    except NumericalBlowupError as exc:
        print(f"error: {exc}", file=log)
        return EXIT_FAIL


def _list_stencils(stream) -> int:
    print(f"{'name':<12}{'taps':>6}{'radius':>8}", file=stream)
    for name in BUILTIN_STENCILS:
        k = builtin_stencil(name)
        print(f"{name:<12}{len(k):>6}{k.radius:>8}", file=stream)
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fftstencil",
        description="Evolve linear stencils over many timesteps with FFTs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for mode in MODES:
        p = sub.add_parser(mode, help=f"run a problem spec in {mode} mode")
        p.add_argument("--spec", required=True, help="TOML problem spec")
        p.add_argument("--threads", type=int, default=None,
                       help="FFT worker count (default: $FFTSTENCIL_THREADS or all cores)")
        p.add_argument("--out", default=None, help="output grid path")
        p.add_argument("--format", choices=FORMATS, default=None, help="output grid format")
    sub.add_parser("stencils", help="list builtin stencils")
    return parser


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    if args.command == "stencils":
        return _list_stencils(sys.stdout)
    if args.threads is not None:
        if args.threads < 1:
            print("error: --threads must be positive", file=sys.stderr)
            return EXIT_ERROR
        set_threads(args.threads)
    try:
        spec = load_spec(args.spec)
        return run(spec, args.command, args.out, args.format)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    finally:
        if args.threads is not None:
            set_threads(None)


if __name__ == "__main__":
    sys.exit(main())
