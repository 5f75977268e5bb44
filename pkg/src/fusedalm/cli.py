"""Command-line front end: ``solve``, ``simulate`` and ``bench``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import experiments
from .loss import LossModel
from .simulate import NoiseModel, SignalSpec, generate
from .solver import AlmConfig, DivergenceError, Mode, SolverState, Termination, solve

log = logging.getLogger("fusedalm")

EXIT_OK, EXIT_INPUT, EXIT_MAXITER, EXIT_DIVERGED = 0, 1, 2, 3
SCHEMA_VERSION = 1


class InputError(ValueError):
    pass


def _fmt(v) -> str:
    return repr(float(v))


def read_signal(path) -> np.ndarray:
    """Read one real per line, or a CSV file with a ``y`` column."""
    text = Path(path).read_text()
    lines = text.splitlines()
    first = next((i for i, ln in enumerate(lines) if ln.strip()), None)
    if first is None:
        raise InputError(f"{path}: no data")
    head = lines[first].strip()
    try:
        float(head)
        is_csv = False
    except ValueError:
        is_csv = True

    values = []
    if is_csv:
        reader = csv.reader(io.StringIO(text))
        header = None
        for lineno, row in enumerate(reader, start=1):
            if not row or not "".join(row).strip():
                continue
            if header is None:
                header = [h.strip() for h in row]
                if "y" not in header:
                    raise InputError(f"{path}:{lineno}: header has no 'y' column")
                col = header.index("y")
                continue
            try:
                values.append(float(row[col]))
            except (ValueError, IndexError):
                raise InputError(f"{path}:{lineno}: cannot read a number from {row!r}") from None
    else:
        for lineno, ln in enumerate(lines, start=1):
            if not ln.strip():
                continue
            try:
                values.append(float(ln))
            except ValueError:
                raise InputError(f"{path}:{lineno}: cannot read a number from {ln.strip()!r}") from None
    y = np.array(values, dtype=float)
    bad = np.flatnonzero(~np.isfinite(y))
    if len(bad):
        raise InputError(f"{path}: non-finite value in data row {bad[0] + 1}")
    if len(y) < 2:
        raise InputError(f"{path}: need at least 2 observations, got {len(y)}")
    return y


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, (int, str)) else _fmt(v) for v in row])


def _config(args) -> AlmConfig:
    return AlmConfig(c=args.c, lambda1=args.lambda1, lambda2=args.lambda2, tol=args.tol,
                     max_outer_iters=args.max_iters, inner_T=args.inner_T,
                     mode=Mode(args.mode), record_trace=not args.no_trace)


def cmd_solve(args) -> int:
    try:
        y = read_signal(args.input)
        loss = LossModel.from_name(args.loss, args.huber_delta)
        cfg = _config(args)
    except (InputError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT

    init = None
    if args.init != "y":
        beta0 = (np.zeros(len(y)) if args.init == "zeros"
                 else np.random.default_rng(args.seed).standard_normal(len(y)))
        init = SolverState.initial(y, cfg.mode, beta0)

    t0 = time.perf_counter()
    try:
        rep = solve(y, loss, cfg, init)
    except DivergenceError as exc:
        log.error("%s", exc)
        return EXIT_DIVERGED
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    wall_ms = 1000.0 * (time.perf_counter() - t0)

    out = Path(args.out) if args.out else Path(args.input).with_suffix(".fit.csv")
    write_csv(out, ["index", "y", "beta_hat"],
              ((i, y[i], rep.beta_hat[i]) for i in range(len(y))))
    if cfg.record_trace:
        write_csv(out.with_suffix(".trace.csv"),
                  ["iteration", "objective", "dual_residual", "primal_residual"],
                  ((k + 1, rep.objective_trace[k], rep.dual_residual_trace[k],
                    rep.primal_residual_trace[k]) for k in range(rep.iterations)))
    sidecar = {
        "schema": SCHEMA_VERSION,
        "iterations": rep.iterations,
        "terminated": rep.terminated.value,
        "final_objective": rep.final_objective,
        "final_dual_residual": rep.final_dual_residual,
        "wall_time_ms": wall_ms,
    }
    out.with_suffix(".json").write_text(json.dumps(sidecar, indent=2) + "\n")
    log.info("%d iterations, %s, objective %.12g", rep.iterations, rep.terminated.value,
             rep.final_objective)
    return EXIT_OK if rep.terminated is Termination.CONVERGED else EXIT_MAXITER


def _noise(args) -> NoiseModel:
    if args.noise == "gaussian":
        return NoiseModel.gaussian(args.variance)
    return NoiseModel.student_t(args.df, args.scale)


def cmd_simulate(args) -> int:
    try:
        spec = SignalSpec(args.n, seed=args.seed, noise=_noise(args),
                          min_block_length=args.min_block)
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    truth, noisy = generate(spec)
    out = args.out or f"signal_n{args.n}_seed{args.seed}.csv"
    write_csv(out, ["truth", "noisy"], zip(truth, noisy))
    return EXIT_OK


def cmd_bench(args) -> int:
    outdir = Path(args.out or f"bench_exp{args.experiment}")
    outdir.mkdir(parents=True, exist_ok=True)
    if args.experiment == 1:
        sizes = tuple(args.sizes) if args.sizes else experiments.INNER_T_SIZES
        rows = experiments.inner_loop_table(sizes=sizes, replicates=args.replicates,
                                            seed=args.seed, c=args.c, tol=args.tol,
                                            jobs=args.jobs)
        write_csv(outdir / "exp1_inner_loop.csv",
                  ["T", "n", "mean_outer_iters", "mean_inner_sweeps", "mean_wall_time_s"], rows)
    elif args.experiment == 2:
        n = args.sizes[0] if args.sizes else 1000
        res = experiments.penalty_traces(n=n, seed=args.seed, iters=args.trace_iters)
        for c in res.c_values:
            write_csv(outdir / f"exp2_mse_c{c:g}.csv", ["iteration", "mse"],
                      ((k + 1, v) for k, v in enumerate(res.mse[c])))
        write_csv(outdir / "exp2_summary.csv", ["c", "settle_iteration", "final_mse", "reference_mse"],
                  ((_fmt(c), res.settle_iters[c], res.mse[c][-1], res.reference_mse)
                   for c in res.c_values))
    elif args.experiment == 4:
        n = args.sizes[0] if args.sizes else 100
        res = experiments.robust_comparison(n=n, seed=args.seed, c=args.c)
        write_csv(outdir / "exp4_reconstruction.csv",
                  ["index", "truth", "noisy", "quadratic", "lad"],
                  ((i, res.truth[i], res.noisy[i], res.fits["quadratic"][i], res.fits["lad"][i])
                   for i in range(len(res.truth))))
        write_csv(outdir / "exp4_summary.csv", ["loss", "lambda1", "lambda2", "mse_to_truth"],
                  ((k, *res.params[k], res.mse[k]) for k in ("quadratic", "lad")))
    else:
        log.error("unknown experiment %r; choose 1, 2 or 4", args.experiment)
        return EXIT_INPUT
    return EXIT_OK


def _solver_flags(p):
    p.add_argument("--lambda1", type=float, default=0.0)
    p.add_argument("--lambda2", type=float, default=1.0)
    p.add_argument("--c", type=float, default=5.0, help="augmentation weight")
    p.add_argument("--loss", default="quadratic", choices=["quadratic", "lad", "huber"])
    p.add_argument("--huber-delta", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iters", type=int, default=100_000)
    p.add_argument("--inner-T", dest="inner_T", type=int, default=1)
    p.add_argument("--mode", choices=["double", "single"], default="double")
    p.add_argument("--no-trace", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fusedalm", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="fit a signal read from a file")
    ps.add_argument("input")
    ps.add_argument("--out", help="output CSV; sidecar JSON goes next to it")
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--init", choices=["y", "zeros", "random"], default="y")
    _solver_flags(ps)
    ps.set_defaults(func=cmd_solve)

    pm = sub.add_parser("simulate", help="write a synthetic truth/noisy CSV")
    pm.add_argument("--n", type=int, default=1000)
    pm.add_argument("--seed", type=int, default=0)
    pm.add_argument("--noise", choices=["gaussian", "t"], default="gaussian")
    pm.add_argument("--variance", type=float, default=0.1)
    pm.add_argument("--df", type=float, default=2.0)
    pm.add_argument("--scale", type=float, default=0.3)
    pm.add_argument("--min-block", type=int, default=None)
    pm.add_argument("--out")
    pm.set_defaults(func=cmd_simulate)

    pb = sub.add_parser("bench", help="run a simulation experiment (1, 2 or 4)")
    pb.add_argument("--experiment", type=int, required=True)
    pb.add_argument("--replicates", type=int, default=10)
    pb.add_argument("--sizes", type=int, nargs="+")
    pb.add_argument("--seed", type=int, default=experiments.ROBUST_SEED)
    pb.add_argument("--c", type=float, default=5.0)
    pb.add_argument("--tol", type=float, default=1e-10)
    pb.add_argument("--trace-iters", type=int, default=1000)
    pb.add_argument("--jobs", type=int, default=1)
    pb.add_argument("--out", help="output directory")
    pb.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
