"""Slow reference solvers, kept independent of the ALM code path.

Used only by tests and acceptance runs: a dense grid search for the
one-dimensional coordinate problems and a plain subgradient method for
the whole FLSA objective.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
_KIND_CODES = {"quadratic": 0, "lad": 1, "huber": 2}


@dataclass(frozen=True)
class OracleConfig:
    grid_points: int = 10_001
    subgrad_iters: int = 200_000
    subgrad_step0: float = 1.0
    # each stage restarts the step schedule from the best iterate so far,
    # with step0 shrunk tenfold
    stages: int = 4

    def __post_init__(self):
        if (self.grid_points < 3 or self.subgrad_iters < 1 or not self.subgrad_step0 > 0
                or self.stages < 1):
            raise ValueError("oracle settings must be positive (grid_points >= 3)")


def _eval(f, xs):
    try:
        v = np.asarray(f(xs), dtype=float)
        if v.shape == xs.shape:
            return v
    except (TypeError, ValueError):
        pass
    return np.array([f(float(x)) for x in xs])


def grid_minimize_1d(f, lo: float, hi: float, resolution: float = 1e-8,
                     grid_points: int = 10_001) -> float:
    """Minimize a convex scalar function on ``[lo, hi]``.

    Scans an even grid, then runs golden-section search on the two cells
    around the best grid point until the bracket is narrower than
    ``resolution``.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    xs = np.linspace(lo, hi, grid_points)
    i = int(np.argmin(_eval(f, xs)))
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, grid_points - 1)]
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = float(f(x1)), float(f(x2))
    while b - a > resolution:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = float(f(x1))
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = float(f(x2))
    return 0.5 * (a + b)


@njit(cache=True)
def _flsa_value(beta, y, kind, delta, l1, l2):
    n = beta.shape[0]
    s = 0.0
    for i in range(n):
        r = y[i] - beta[i]
        if kind == 0:
            s += 0.5 * r * r
        elif kind == 1:
            s += abs(r)
        else:
            a = abs(r)
            s += 0.5 * a * a if a <= delta else delta * (a - 0.5 * delta)
        s += l1 * abs(beta[i])
        if i > 0:
            s += l2 * abs(beta[i] - beta[i - 1])
    return s


@njit(cache=True)
def _subgrad_kernel(y, beta0, kind, delta, l1, l2, iters, step0):
    n = y.shape[0]
    beta = beta0.copy()
    best = beta0.copy()
    best_val = _flsa_value(beta, y, kind, delta, l1, l2)
    g = np.empty(n)
    for k in range(1, iters + 1):
        for i in range(n):
            r = beta[i] - y[i]
            if kind == 0:
                gi = r
            elif kind == 1:
                gi = 1.0 if r > 0 else (-1.0 if r < 0 else 0.0)
            else:
                gi = min(max(r, -delta), delta)
            if beta[i] > 0:
                gi += l1
            elif beta[i] < 0:
                gi -= l1
            g[i] = gi
        for i in range(1, n):
            d = beta[i] - beta[i - 1]
            if d != 0.0:
                s = l2 if d > 0 else -l2
                g[i] += s
                g[i - 1] -= s
        norm = 0.0
        for i in range(n):
            norm += g[i] * g[i]
        norm = np.sqrt(norm)
        if norm == 0.0:
            break
        step = step0 / np.sqrt(k) / norm
        for i in range(n):
            beta[i] -= step * g[i]
        val = _flsa_value(beta, y, kind, delta, l1, l2)
        if val < best_val:
            best_val = val
            best[:] = beta
    return best


def subgradient_solve(y, loss, lambda1: float, lambda2: float,
                      cfg: OracleConfig | None = None, beta0=None) -> np.ndarray:
    """Best iterate of a normalized subgradient method.

    Each stage runs ``subgrad_iters`` steps of length ``step0 / sqrt(k)``
    along ``-g / ||g||``, starting from the best point found so far; step0
    drops tenfold per stage. Ties in the absolute values use the
    subgradient element 0. Intended for ``n <= 200``.
    """
    cfg = cfg or OracleConfig()
    y = np.asarray(y, dtype=float)
    beta = y.copy() if beta0 is None else np.array(beta0, dtype=float)
    for stage in range(cfg.stages):
        step0 = cfg.subgrad_step0 * 0.1**stage
        if loss.kind in _KIND_CODES:
            beta = _subgrad_kernel(y, beta, _KIND_CODES[loss.kind], float(loss.delta),
                                   float(lambda1), float(lambda2), cfg.subgrad_iters, step0)
        else:
            beta = _subgrad_python(y, beta, loss, lambda1, lambda2, cfg.subgrad_iters, step0)
    return beta


def _subgrad_python(y, beta, loss, l1, l2, iters, step0):
    def value(b):
        return (float(np.sum(loss.evaluate(b, y))) + l1 * np.abs(b).sum()
                + l2 * np.abs(np.diff(b)).sum())

    best, best_val = beta.copy(), value(beta)
    for k in range(1, iters + 1):
        lo, hi = loss.subgradient_interval(beta, y)
        g = 0.5 * (lo + hi) + l1 * np.sign(beta)
        s = l2 * np.sign(np.diff(beta))
        g[1:] += s
        g[:-1] -= s
        norm = np.linalg.norm(g)
        if norm == 0:
            break
        beta = beta - step0 / np.sqrt(k) / norm * g
        v = value(beta)
        if v < best_val:
            best, best_val = beta.copy(), v
    return best
