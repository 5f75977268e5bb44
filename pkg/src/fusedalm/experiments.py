"""Desk-scale versions of the simulation experiments.

* ``inner_loop_table``: outer iterations and wall time against the number of
  inner block sweeps T.
* ``penalty_traces``: per-iteration MSE to the true signal for several
  augmentation weights c.
* ``robust_comparison``: quadratic vs. absolute-deviation loss under
  heavy-tailed noise, each with its regularization tuned on the truth.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .loss import LossModel
from .simulate import NoiseModel, SignalSpec, generate
from .solver import AlmConfig, solve

INNER_T_VALUES = (1, 2, 5, 10)
INNER_T_SIZES = (200, 2000)
PENALTY_VALUES = (0.05, 0.5, 5.0, 50.0, 500.0)
LAMBDA1_GRID = (0.0, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5)
LAMBDA2_GRID = (0.1, 0.2, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0)
ROBUST_SEED = 0


def _one_replicate(args):
    n, T, seed, c, lambda1, lambda2, variance, tol = args
    _, y = generate(SignalSpec(n, seed=seed, noise=NoiseModel.gaussian(variance)))
    cfg = AlmConfig(c=c, lambda1=lambda1, lambda2=lambda2, tol=tol, inner_T=T,
                    record_trace=False)
    t0 = time.perf_counter()
    rep = solve(y, LossModel.quadratic(), cfg)
    return rep.iterations, rep.inner_sweeps, time.perf_counter() - t0


def inner_loop_table(sizes=INNER_T_SIZES, T_values=INNER_T_VALUES, replicates=10, seed=0,
                     c=5.0, lambda1=0.5, lambda2=4.0, variance=0.1, tol=1e-10, jobs=1):
    """Rows of ``(T, n, mean_outer_iters, mean_inner_sweeps, mean_wall_time_s)``.

    Replicate r of every cell uses signal seed ``seed + r``, so all T values
    see the same signals.
    """
    tasks = [(n, T, seed + r, c, lambda1, lambda2, variance, tol)
             for n in sizes for T in T_values for r in range(replicates)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_one_replicate, tasks))
    else:
        results = [_one_replicate(t) for t in tasks]
    rows = []
    for i, (n, T) in enumerate(itertools.product(sizes, T_values)):
        chunk = np.array(results[i * replicates:(i + 1) * replicates])
        rows.append((T, n, *chunk.mean(axis=0)))
    return rows


@dataclass
class PenaltyTraces:
    c_values: tuple
    mse: dict          # c -> per-iteration MSE to truth
    reference_mse: float
    settle_iters: dict  # c -> first iteration after which MSE stays within 10% of reference


def settle_iteration(mse: np.ndarray, target: float, rel: float = 0.1) -> int:
    """First iteration (1-based) from which ``|mse - target| <= rel * target``
    holds for the rest of the trace; ``len(mse) + 1`` if it never settles."""
    bad = np.flatnonzero(np.abs(mse - target) > rel * target)
    if len(bad) == 0:
        return 1
    return int(bad[-1]) + 2


def penalty_traces(n=1000, seed=0, c_values=PENALTY_VALUES, lambda1=0.0, lambda2=0.1,
                   variance=0.1, iters=1000) -> PenaltyTraces:
    """MSE-to-truth traces over a fixed iteration budget for each c.

    The reference MSE is that of the converged estimate (c=5, tol=1e-10),
    which every c approaches in the limit.
    """
    truth, y = generate(SignalSpec(n, seed=seed, noise=NoiseModel.gaussian(variance)))
    ref = solve(y, config=AlmConfig(c=5.0, lambda1=lambda1, lambda2=lambda2, record_trace=False))
    ref_mse = float(np.mean((ref.beta_hat - truth) ** 2))
    mse, settle = {}, {}
    for c in c_values:
        trace = []
        cfg = AlmConfig(c=c, lambda1=lambda1, lambda2=lambda2, tol=1e-300,
                        max_outer_iters=iters, record_trace=False)
        solve(y, config=cfg, callback=lambda k, st: trace.append(np.mean((st.beta - truth) ** 2)))
        mse[c] = np.asarray(trace)
        settle[c] = settle_iteration(mse[c], ref_mse)
    return PenaltyTraces(tuple(c_values), mse, ref_mse, settle)


@dataclass
class RobustComparison:
    truth: np.ndarray
    noisy: np.ndarray
    fits: dict       # loss name -> reconstruction
    params: dict     # loss name -> (lambda1, lambda2)
    mse: dict        # loss name -> MSE to truth


def robust_comparison(n=100, seed=ROBUST_SEED, df=2.0, scale=0.3, lambda1_grid=LAMBDA1_GRID,
                      lambda2_grid=LAMBDA2_GRID, c=5.0, tol=1e-10) -> RobustComparison:
    """Fit both losses over the lambda grid and keep, for each, the fit that
    is closest to the truth in its own sense: squared error for the
    quadratic loss, absolute error for the LAD loss."""
    truth, y = generate(SignalSpec(n, seed=seed, noise=NoiseModel.student_t(df, scale)))
    fits, params, mse = {}, {}, {}
    for name, err in (("quadratic", np.square), ("lad", np.abs)):
        loss = LossModel.from_name(name)
        best = None
        for l1, l2 in itertools.product(lambda1_grid, lambda2_grid):
            b = solve(y, loss, AlmConfig(c=c, lambda1=l1, lambda2=l2, tol=tol,
                                         record_trace=False)).beta_hat
            score = float(np.sum(err(b - truth)))
            if best is None or score < best[0]:
                best = (score, b, (l1, l2))
        fits[name], params[name] = best[1], best[2]
        mse[name] = float(np.mean((best[1] - truth) ** 2))
    return RobustComparison(truth, y, fits, params, mse)
