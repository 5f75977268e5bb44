"""Convex per-coordinate losses and their penalized coordinate minimizers.

Every gamma-update minimizes, separately in each coordinate,

    F(gamma, y) + lambda1 * |gamma| + mu * (gamma - beta) + c/2 * (gamma - beta)**2

which is strongly convex in ``gamma`` because ``c > 0``. The quadratic and
least-absolute-deviation losses have exact finite-step solutions; any other
convex, coercive loss goes through a bracketing bisection on the subgradient.

All array-level functions broadcast over numpy arrays, so the solver updates
the whole gamma block with one call.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numba import njit

MAX_EXPANSIONS = 200


class BracketError(RuntimeError):
    """The generic coordinate solver could not bracket a minimizer."""


def soft_threshold(x, t):
    """Return ``sign(x) * max(|x| - t, 0)``; the prox operator of ``t * |.|``."""
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


@dataclass(frozen=True)
class CoordinateProblem:
    """One gamma-coordinate subproblem.

    Fields may be scalars or equally shaped arrays (one entry per coordinate).
    """

    y: float
    beta: float
    mu: float
    c: float
    lambda1: float = 0.0

    def __post_init__(self):
        if not np.all(np.asarray(self.c) > 0):
            raise ValueError("c must be positive")
        if not np.all(np.asarray(self.lambda1) >= 0):
            raise ValueError("lambda1 must be nonnegative")
        for name in ("y", "beta", "mu", "c", "lambda1"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} must be finite")

    def penalty(self, gamma):
        """Everything in the subproblem except the loss itself."""
        d = gamma - self.beta
        return self.lambda1 * np.abs(gamma) + self.mu * d + 0.5 * self.c * d * d


def _quadratic_value(gamma, y):
    r = y - gamma
    return 0.5 * r * r


def _quadratic_subgrad(gamma, y):
    g = gamma - y
    return g, g


def _lad_value(gamma, y):
    return np.abs(y - gamma)


def _lad_subgrad(gamma, y):
    s = np.sign(gamma - y)
    tie = s == 0
    return np.where(tie, -1.0, s), np.where(tie, 1.0, s)


@dataclass(frozen=True)
class LossModel:
    """A separable convex, coercive loss ``F_i(gamma_i, y_i)``.

    Parameters
    ----------
    kind : {"quadratic", "lad", "huber", "custom"}
    delta : float
        Huber transition point; ignored by the other kinds.
    value : callable, optional
        ``value(gamma, y)`` for ``kind="custom"``. Must broadcast over arrays.
    subgradient : callable, optional
        ``subgradient(gamma, y) -> (lo, hi)``, the endpoints of the
        subdifferential in ``gamma``, for ``kind="custom"``.
    """

    kind: str = "quadratic"
    delta: float = 1.0
    value: Callable | None = None
    subgradient: Callable | None = None

    def __post_init__(self):
        if self.kind not in ("quadratic", "lad", "huber", "custom"):
            raise ValueError(f"unknown loss kind {self.kind!r}")
        if self.kind == "huber" and not self.delta > 0:
            raise ValueError("huber delta must be positive")
        if self.kind == "custom" and (self.value is None or self.subgradient is None):
            raise ValueError("custom loss needs both value and subgradient callables")

    @classmethod
    def quadratic(cls) -> LossModel:
        return cls("quadratic")

    @classmethod
    def lad(cls) -> LossModel:
        return cls("lad")

    @classmethod
    def huber(cls, delta: float = 1.0) -> LossModel:
        return cls("huber", delta=delta)

    @classmethod
    def from_name(cls, name: str, delta: float = 1.0) -> LossModel:
        """Build a loss from its CLI name: ``quadratic``, ``lad`` or ``huber``."""
        key = name.strip().lower()
        if key in ("quadratic", "lad", "huber"):
            return cls(key, delta=delta)
        raise ValueError(f"unknown loss {name!r}; expected quadratic, lad or huber")

    def evaluate(self, gamma, y):
        if self.kind == "quadratic":
            return _quadratic_value(gamma, y)
        if self.kind == "lad":
            return _lad_value(gamma, y)
        if self.kind == "huber":
            a = np.abs(y - gamma)
            d = self.delta
            return np.where(a <= d, 0.5 * a * a, d * (a - 0.5 * d))
        return self.value(gamma, y)

    def subgradient_interval(self, gamma, y):
        """Endpoints ``(lo, hi)`` of the subdifferential of the loss in gamma."""
        if self.kind == "quadratic":
            return _quadratic_subgrad(gamma, y)
        if self.kind == "lad":
            return _lad_subgrad(gamma, y)
        if self.kind == "huber":
            g = np.clip(gamma - y, -self.delta, self.delta)
            return g, g
        return self.subgradient(gamma, y)

    def gamma_update(self, y, beta, mu, c, lambda1, tol=1e-12):
        """Array-level coordinate minimizer dispatched on the loss kind."""
        if self.kind == "quadratic":
            return quadratic_gamma(y, beta, mu, c, lambda1)
        if self.kind == "lad":
            return lad_gamma(y, beta, mu, c, lambda1)
        return generic_gamma(self, y, beta, mu, c, lambda1, tol)


def quadratic_gamma(y, beta, mu, c, lambda1):
    return soft_threshold((y + c * beta - mu) / (1.0 + c), lambda1 / (1.0 + c))


def lad_gamma(y, beta, mu, c, lambda1):
    y, beta, mu = np.broadcast_arrays(
        np.asarray(y, dtype=float), np.asarray(beta, dtype=float), np.asarray(mu, dtype=float)
    )
    # rows: kink 0, kink y, then interior stationary points for each sign pair
    cand = np.empty((6,) + y.shape)
    ok = np.ones((6,) + y.shape, dtype=bool)
    cand[0] = 0.0
    cand[1] = y
    row = 2
    for s_y in (-1.0, 1.0):
        for s_g in (-1.0, 1.0):
            g = beta + (s_y - lambda1 * s_g - mu) / c
            cand[row] = g
            ok[row] = (s_y * (y - g) > 0) & (s_g * g > 0)
            row += 1
    d = cand - beta
    val = np.abs(y - cand) + lambda1 * np.abs(cand) + mu * d + 0.5 * c * d * d
    val = np.where(ok, val, np.inf)
    # lexsort keys are applied last-first: objective, then |gamma|, then gamma
    order = np.lexsort((cand, np.abs(cand), val), axis=0)
    best = np.take_along_axis(cand, order[:1], axis=0)[0]
    return best if best.ndim else float(best)


@njit(cache=True)
def _builtin_bounds(g, y, beta, mu, c, l1, kind, delta):
    r = g - y
    if kind == 0:
        lo = hi = r
    elif kind == 1:
        lo = -1.0 if r <= 0 else 1.0
        hi = 1.0 if r >= 0 else -1.0
    else:
        lo = hi = min(max(r, -delta), delta)
    lin = mu + c * (g - beta)
    return lo + (l1 if g > 0 else -l1) + lin, hi + (-l1 if g < 0 else l1) + lin


@njit(cache=True)
def _builtin_bisect(y, beta, mu, c, l1, kind, delta, tol, out):
    # Same bracket-then-bisect scheme as generic_gamma, one coordinate at a time.
    for i in range(y.shape[0]):
        h = 1.0 + abs(y[i] - beta[i])
        a = beta[i] - h
        b = beta[i] + h
        ok = False
        for _ in range(MAX_EXPANSIONS):
            left_ok = _builtin_bounds(a, y[i], beta[i], mu[i], c, l1, kind, delta)[0] <= 0
            right_ok = _builtin_bounds(b, y[i], beta[i], mu[i], c, l1, kind, delta)[1] >= 0
            if left_ok and right_ok:
                ok = True
                break
            h *= 2.0
            if not left_ok:
                a = beta[i] - h
            if not right_ok:
                b = beta[i] + h
        if not ok:
            return i
        while b - a > tol:
            m = 0.5 * (a + b)
            if m <= a or m >= b:
                break
            lo, hi = _builtin_bounds(m, y[i], beta[i], mu[i], c, l1, kind, delta)
            if lo > 0:
                b = m
            elif hi < 0:
                a = m
            else:
                a = b = m
        out[i] = 0.5 * (a + b)
    return -1


_BUILTIN = {"quadratic": 0, "lad": 1, "huber": 2}


def generic_gamma(loss: LossModel, y, beta, mu, c, lambda1, tol=1e-12):
    if loss.kind in _BUILTIN:
        return _generic_builtin(loss, y, beta, mu, c, lambda1, tol)
    return _generic_numpy(loss, y, beta, mu, c, lambda1, tol)


def _generic_builtin(loss, y, beta, mu, c, lambda1, tol):
    y, beta, mu = np.broadcast_arrays(
        np.asarray(y, dtype=float), np.asarray(beta, dtype=float), np.asarray(mu, dtype=float)
    )
    scalar = y.ndim == 0
    y, beta, mu = np.atleast_1d(y), np.atleast_1d(beta), np.atleast_1d(mu)
    out = np.empty(y.shape)
    bad = _builtin_bisect(y, beta, mu, float(c), float(lambda1), _BUILTIN[loss.kind],
                          float(loss.delta), float(tol), out)
    if bad >= 0:
        raise BracketError(f"no bracket after {MAX_EXPANSIONS} expansions at coordinate {bad}")
    return float(out[0]) if scalar else out


def _generic_numpy(loss: LossModel, y, beta, mu, c, lambda1, tol=1e-12):
    y, beta, mu = np.broadcast_arrays(
        np.asarray(y, dtype=float), np.asarray(beta, dtype=float), np.asarray(mu, dtype=float)
    )
    scalar = y.ndim == 0
    y, beta, mu = np.atleast_1d(y), np.atleast_1d(beta), np.atleast_1d(mu)

    def bounds(g):
        lo, hi = loss.subgradient_interval(g, y)
        lin = mu + c * (g - beta)
        pen_lo = np.where(g > 0, lambda1, -lambda1)
        pen_hi = np.where(g < 0, -lambda1, lambda1)
        return lo + pen_lo + lin, hi + pen_hi + lin

    h = 1.0 + np.abs(y - beta)
    a = beta - h
    b = beta + h
    for _ in range(MAX_EXPANSIONS):
        left_ok = bounds(a)[0] <= 0
        right_ok = bounds(b)[1] >= 0
        if left_ok.all() and right_ok.all():
            break
        h = np.where(left_ok & right_ok, h, 2.0 * h)
        a = np.where(left_ok, a, beta - h)
        b = np.where(right_ok, b, beta + h)
    else:
        raise BracketError(
            f"no bracket after {MAX_EXPANSIONS} expansions; is the loss coercive?"
        )

    while True:
        width = b - a
        if not np.any(width > tol):
            break
        m = 0.5 * (a + b)
        stalled = (m <= a) | (m >= b)
        if stalled.all():
            break
        lo, hi = bounds(m)
        go_left = lo > 0
        go_right = hi < 0
        hit = ~(go_left | go_right)
        b = np.where(go_left | hit, m, b)
        a = np.where(go_right | hit, m, a)
    out = 0.5 * (a + b)
    return float(out[0]) if scalar else out


def quadratic_gamma_update(p: CoordinateProblem):
    """Closed-form gamma for the loss ``(y - gamma)**2 / 2``."""
    return quadratic_gamma(p.y, p.beta, p.mu, p.c, p.lambda1)


def lad_gamma_update(p: CoordinateProblem):
    """Exact gamma for the absolute-deviation loss ``|y - gamma|``.

    The objective is piecewise quadratic with kinks at 0 and ``y``. Its
    minimizer is either one of the two kinks or a stationary point of one of
    the four smooth pieces, so six candidates are compared. Interior
    candidates count only when they sit strictly inside the piece whose
    signs produced them. Exact ties prefer smaller ``|gamma|``, then smaller
    ``gamma``.
    """
    return lad_gamma(p.y, p.beta, p.mu, p.c, p.lambda1)


def generic_gamma_update(loss: LossModel, p: CoordinateProblem, tol: float = 1e-12):
    """Minimize the coordinate subproblem for any convex, coercive loss.

    Expands a bracket geometrically around ``beta`` until the subgradient of
    the full subproblem changes sign, then bisects on that sign down to width
    ``tol``. At kinks the sign test uses the subdifferential endpoints, so a
    point whose subdifferential contains zero is returned exactly.

    Raises
    ------
    BracketError
        After 200 expansions without a sign change.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    return generic_gamma(loss, p.y, p.beta, p.mu, p.c, p.lambda1, tol)
