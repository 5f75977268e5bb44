"""Augmented Lagrangian solver for the fused lasso signal approximator.

The problem is

    min_beta  sum_i F(beta_i, y_i) + lambda1 * sum_i |beta_i|
              + lambda2 * sum_i |beta_{i+1} - beta_i|

Splitting off the differences ``theta = diff(beta)`` (and, in the doubly
augmented mode, a copy ``gamma = beta`` that carries the loss and the
lambda1 penalty) makes every block update cheap:

* gamma: a separable one-dimensional problem per coordinate (see ``loss``),
* beta: one tridiagonal linear solve,
* theta: soft thresholding.

Each outer iteration runs ``inner_T`` block sweeps and then one ascent step
on the multipliers ``nu`` (for ``theta = diff(beta)``) and ``mu`` (for
``gamma = beta``). ``inner_T=1`` is the plain alternating scheme; a large
``inner_T`` approximates exact joint minimization before each dual step.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .linalg import solve_banded3
from .loss import LossModel, soft_threshold

log = logging.getLogger(__name__)


class Mode(enum.Enum):
    SINGLY = "single"
    DOUBLY = "double"


class Termination(enum.Enum):
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"


class DivergenceError(FloatingPointError):
    """An iterate became non-finite."""


@dataclass(frozen=True)
class AlmConfig:
    c: float = 5.0
    lambda1: float = 0.0
    lambda2: float = 1.0
    tol: float = 1e-10
    max_outer_iters: int = 100_000
    inner_T: int = 1
    mode: Mode = Mode.DOUBLY
    inner_tol: float = 1e-12
    record_trace: bool = True

    def __post_init__(self):
        if isinstance(self.mode, str):
            object.__setattr__(self, "mode", Mode(self.mode))
        if not self.c > 0:
            raise ValueError("c must be positive")
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("lambda1 and lambda2 must be nonnegative")
        if not self.tol > 0 or not self.inner_tol > 0:
            raise ValueError("tolerances must be positive")
        if self.max_outer_iters < 1 or self.inner_T < 1:
            raise ValueError("max_outer_iters and inner_T must be at least 1")
        if self.mode is Mode.SINGLY and self.lambda1 != 0:
            raise ValueError("singly augmented mode needs lambda1 = 0; "
                             "use fuse_then_threshold or the doubly augmented mode")


@dataclass
class SolverState:
    """Primal and dual iterates.

    ``theta[j]`` and ``nu[j]`` belong to the constraint
    ``theta[j] = beta[j+1] - beta[j]``. ``gamma`` and ``mu`` are ``None`` in
    singly augmented mode.
    """

    beta: np.ndarray
    theta: np.ndarray
    nu: np.ndarray
    gamma: np.ndarray | None = None
    mu: np.ndarray | None = None
    outer_iter: int = 0

    @classmethod
    def initial(cls, y, mode: Mode = Mode.DOUBLY, beta0=None) -> SolverState:
        y = np.asarray(y, dtype=float)
        n = len(y)
        beta = y.copy() if beta0 is None else np.array(beta0, dtype=float)
        doubly = mode is Mode.DOUBLY
        return cls(
            beta=beta,
            theta=np.zeros(n - 1),
            nu=np.zeros(n - 1),
            gamma=np.zeros(n) if doubly else None,
            mu=np.zeros(n) if doubly else None,
        )

    def copy(self) -> SolverState:
        cp = lambda a: None if a is None else np.array(a, dtype=float)  # noqa: E731
        return SolverState(cp(self.beta), cp(self.theta), cp(self.nu),
                           cp(self.gamma), cp(self.mu), self.outer_iter)


@dataclass
class SolveReport:
    beta_hat: np.ndarray
    objective_trace: np.ndarray
    dual_residual_trace: np.ndarray
    primal_residual_trace: np.ndarray
    iterations: int
    terminated: Termination
    state: SolverState = field(repr=False)
    final_objective: float = np.nan
    final_dual_residual: float = np.nan
    final_primal_residual: float = np.nan
    inner_sweeps: int = 0

    @property
    def converged(self) -> bool:
        return self.terminated is Termination.CONVERGED


def objective(beta, y, loss: LossModel, lambda1: float, lambda2: float) -> float:
    """FLSA objective: total loss plus both L1 penalties."""
    beta = np.asarray(beta, dtype=float)
    fit = float(np.sum(loss.evaluate(beta, np.asarray(y, dtype=float))))
    return fit + lambda1 * float(np.sum(np.abs(beta))) + lambda2 * float(np.sum(np.abs(np.diff(beta))))


def augmented_lagrangian(beta, theta, nu, c, y, loss: LossModel, lambda1, lambda2,
                         gamma=None, mu=None) -> float:
    """Value of the (singly or doubly) augmented Lagrangian.

    With ``gamma`` omitted, the loss and lambda1 act on ``beta`` directly.
    """
    beta = np.asarray(beta, dtype=float)
    r = theta - np.diff(beta)
    val = lambda2 * np.sum(np.abs(theta)) + np.dot(nu, r) + 0.5 * c * np.dot(r, r)
    if gamma is None:
        return float(val + np.sum(loss.evaluate(beta, y)) + lambda1 * np.sum(np.abs(beta)))
    s = gamma - beta
    val += np.sum(loss.evaluate(gamma, y)) + lambda1 * np.sum(np.abs(gamma))
    return float(val + np.dot(mu, s) + 0.5 * c * np.dot(s, s))


def theta_update(beta, nu, c: float, lambda2: float) -> np.ndarray:
    return soft_threshold(np.diff(beta) - np.asarray(nu) / c, lambda2 / c)


def _edge_difference(v: np.ndarray, n: int) -> np.ndarray:
    # out[j] = v[j-1] - v[j], with v[-1] = v[n-1] = 0 (the transpose of diff)
    out = np.zeros(n)
    out[1:] += v
    out[:-1] -= v
    return out


def _diagonals(n: int, c: float, anchor: float):
    # anchor is the weight tying beta to gamma (c) or to y (1)
    main = np.full(n, anchor + 2.0 * c)
    main[0] -= c
    main[-1] -= c
    off = np.full(n - 1, -c)
    return off, main


def beta_update_doubly(gamma, theta, mu, nu, c: float, _work=None) -> np.ndarray:
    """Exact beta-minimizer of the doubly augmented Lagrangian.

    Stationarity in each ``beta_j`` gives a tridiagonal system with diagonal
    ``(2c, 3c, ..., 3c, 2c)`` and off-diagonals ``-c``.
    """
    gamma = np.asarray(gamma, dtype=float)
    n = len(gamma)
    off, main = _work[:2] if _work is not None else _diagonals(n, c, c)
    rhs = c * gamma + mu + c * _edge_difference(theta, n) + _edge_difference(nu, n)
    return solve_banded3(off, main, off, rhs, None if _work is None else _work[2])


def beta_update_singly_quadratic(y, theta, nu, c: float, _work=None) -> np.ndarray:
    """Exact beta-minimizer of the singly augmented Lagrangian for the
    quadratic loss with ``lambda1 = 0``. Diagonal ``(1+c, 1+2c, ..., 1+c)``."""
    y = np.asarray(y, dtype=float)
    n = len(y)
    off, main = _work[:2] if _work is not None else _diagonals(n, c, 1.0)
    rhs = y + c * _edge_difference(theta, n) + _edge_difference(nu, n)
    return solve_banded3(off, main, off, rhs, None if _work is None else _work[2])


def dual_update(state: SolverState, c: float):
    """Multiplier ascent step; returns new ``(mu, nu)`` without mutating ``state``."""
    nu = state.nu + c * (state.theta - np.diff(state.beta))
    mu = None if state.gamma is None else state.mu + c * (state.gamma - state.beta)
    return mu, nu


def _check_finite(state: SolverState, k: int):
    parts = [state.beta, state.theta, state.nu]
    if state.gamma is not None:
        parts += [state.gamma, state.mu]
    if not all(np.isfinite(p).all() for p in parts):
        raise DivergenceError(f"non-finite iterate at outer iteration {k}")


def solve(y, loss: LossModel | None = None, config: AlmConfig | None = None,
          init: SolverState | None = None,
          callback: Callable[[int, SolverState], None] | None = None) -> SolveReport:
    """Run the augmented Lagrangian iteration until the multipliers settle.

    Parameters
    ----------
    y : array_like
        Observations, length ``n >= 1``.
    loss : LossModel, optional
        Defaults to the quadratic loss.
    config : AlmConfig, optional
    init : SolverState, optional
        Starting iterates. Defaults to ``beta = y`` and zeros elsewhere.
    callback : callable, optional
        Called as ``callback(k, state)`` after every outer iteration.

    Returns
    -------
    SolveReport
        Stops once ``||nu^k - nu^{k-1}|| + ||mu^k - mu^{k-1}|| < tol``
        (Euclidean norms) and ``c * ||beta^k - beta^{k-1}|| < tol``, or after
        ``max_outer_iters``. With a single observation there are no fused
        constraints and the loop reduces to repeated gamma-updates.

    Raises
    ------
    DivergenceError
        If any iterate turns NaN or infinite.
    """
    loss = loss or LossModel.quadratic()
    cfg = config or AlmConfig()
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or len(y) < 1:
        raise ValueError("y must be a non-empty 1-d array")
    if not np.isfinite(y).all():
        raise ValueError("y contains non-finite values")
    doubly = cfg.mode is Mode.DOUBLY
    if not doubly and loss.kind != "quadratic":
        raise ValueError("singly augmented mode supports only the quadratic loss")
    n = len(y)
    c, l1, l2 = cfg.c, cfg.lambda1, cfg.lambda2

    st = SolverState.initial(y, cfg.mode) if init is None else init.copy()
    if doubly and st.gamma is None:
        st.gamma, st.mu = np.zeros(n), np.zeros(n)
    if len(st.beta) != n or len(st.theta) != n - 1 or len(st.nu) != n - 1:
        raise ValueError("initial state does not match the length of y")

    with np.errstate(over="ignore", invalid="ignore"):
        if n == 1:
            return _solve_single(y, loss, cfg, st)
        return _run(y, loss, cfg, st, callback)


def _run(y, loss, cfg, st, callback):
    n = len(y)
    c, l1, l2 = cfg.c, cfg.lambda1, cfg.lambda2
    doubly = cfg.mode is Mode.DOUBLY
    off, main = _diagonals(n, c, c if doubly else 1.0)
    work = (off, main, np.empty(n))

    obj_tr, dual_tr, primal_tr = [], [], []
    terminated = Termination.MAX_ITERS
    sweeps = 0
    dual_res = primal_res = np.nan
    k = 0
    for k in range(1, cfg.max_outer_iters + 1):
        beta_prev = st.beta
        for t in range(cfg.inner_T):
            if cfg.inner_T > 1:
                prev = (st.beta, st.theta, st.gamma)
            if doubly:
                st.gamma = loss.gamma_update(y, st.beta, st.mu, c, l1)
                st.beta = beta_update_doubly(st.gamma, st.theta, st.mu, st.nu, c, work)
            else:
                st.beta = beta_update_singly_quadratic(y, st.theta, st.nu, c, work)
            st.theta = theta_update(st.beta, st.nu, c, l2)
            sweeps += 1
            if cfg.inner_T > 1 and t > 0:
                change = max(np.max(np.abs(st.beta - prev[0]), initial=0.0),
                             np.max(np.abs(st.theta - prev[1]), initial=0.0),
                             0.0 if prev[2] is None else np.max(np.abs(st.gamma - prev[2])))
                if change < cfg.inner_tol:
                    break

        fused_gap = st.theta - np.diff(st.beta)
        primal_res = float(np.linalg.norm(fused_gap))
        st.nu = st.nu + c * fused_gap
        if doubly:
            copy_gap = st.gamma - st.beta
            primal_res += float(np.linalg.norm(copy_gap))
            st.mu = st.mu + c * copy_gap
        # ||nu^k - nu^{k-1}|| + ||mu^k - mu^{k-1}|| = c * (primal residual)
        dual_res = c * primal_res
        st.outer_iter += 1
        _check_finite(st, k)

        if cfg.record_trace:
            obj_tr.append(objective(st.beta, y, loss, l1, l2))
            dual_tr.append(dual_res)
            primal_tr.append(primal_res)
        if callback is not None:
            callback(k, st)
        # The multiplier change alone can vanish while beta still moves (e.g. a
        # multiplier pinned at +-lambda2), so beta must have settled as well.
        if dual_res < cfg.tol and c * np.linalg.norm(st.beta - beta_prev) < cfg.tol:
            terminated = Termination.CONVERGED
            break

    if terminated is Termination.MAX_ITERS:
        log.info("stopped after %d iterations, dual residual %.3g", k, dual_res)
    return SolveReport(
        beta_hat=st.beta.copy(),
        objective_trace=np.asarray(obj_tr),
        dual_residual_trace=np.asarray(dual_tr),
        primal_residual_trace=np.asarray(primal_tr),
        iterations=k,
        terminated=terminated,
        state=st,
        final_objective=objective(st.beta, y, loss, l1, l2),
        final_dual_residual=dual_res,
        final_primal_residual=primal_res,
        inner_sweeps=sweeps,
    )


def _solve_single(y, loss, cfg, st):
    # proximal-point iteration on F + lambda1*|.| using the gamma-update
    beta = st.beta.copy()
    terminated = Termination.MAX_ITERS
    obj_tr, step_tr = [], []
    step = np.nan
    for k in range(1, cfg.max_outer_iters + 1):
        new = np.atleast_1d(loss.gamma_update(y, beta, np.zeros(1), cfg.c, cfg.lambda1))
        step = cfg.c * float(abs(new[0] - beta[0]))
        beta = new
        if not np.isfinite(beta).all():
            raise DivergenceError(f"non-finite iterate at outer iteration {k}")
        if cfg.record_trace:
            obj_tr.append(objective(beta, y, loss, cfg.lambda1, cfg.lambda2))
            step_tr.append(step)
        if step < cfg.tol:
            terminated = Termination.CONVERGED
            break
    st.beta = beta
    if st.gamma is not None:
        st.gamma = beta.copy()
    st.outer_iter += k
    return SolveReport(
        beta_hat=beta.copy(), objective_trace=np.asarray(obj_tr),
        dual_residual_trace=np.asarray(step_tr), primal_residual_trace=np.zeros(len(obj_tr)),
        iterations=k, terminated=terminated, state=st,
        final_objective=objective(beta, y, loss, cfg.lambda1, cfg.lambda2),
        final_dual_residual=step, final_primal_residual=0.0, inner_sweeps=k,
    )


def fuse_then_threshold(y, lambda1: float, lambda2: float, config: AlmConfig | None = None) -> np.ndarray:
    """Quadratic-loss FLSA with ``lambda1 > 0`` by soft-thresholding the
    ``lambda1 = 0`` solution at ``lambda1``."""
    cfg = replace(config or AlmConfig(), lambda1=0.0, lambda2=lambda2)
    rep = solve(y, LossModel.quadratic(), cfg)
    return soft_threshold(rep.beta_hat, lambda1)
