"""Thomas-algorithm solver for the tridiagonal systems of the beta-update."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

PIVOT_FLOOR = 1e-14


class SingularSystemError(ValueError):
    """Raised when elimination meets a pivot below ``PIVOT_FLOOR``."""


@dataclass(frozen=True)
class TridiagonalSystem:
    """Tridiagonal linear system ``B x = rhs``.

    ``sub[j]`` couples row ``j + 1`` to column ``j``; ``sup[j]`` couples row
    ``j`` to column ``j + 1``.
    """

    sub: np.ndarray
    main: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        n = len(self.main)
        if n < 1:
            raise ValueError("system must have at least one row")
        if len(self.rhs) != n or len(self.sub) != n - 1 or len(self.sup) != n - 1:
            raise ValueError(
                f"inconsistent lengths: main={n}, rhs={len(self.rhs)}, "
                f"sub={len(self.sub)}, sup={len(self.sup)}"
            )
        for name in ("sub", "main", "sup", "rhs"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} contains non-finite values")

    @property
    def n(self) -> int:
        return len(self.main)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.main * x
        y[:-1] += self.sup * x[1:]
        y[1:] += self.sub * x[:-1]
        return y


@njit(cache=True)
def _thomas(sub, main, sup, rhs, cp, x):
    # Returns the row index of a failed pivot, or -1 on success.
    n = main.shape[0]
    piv = main[0]
    if abs(piv) < PIVOT_FLOOR:
        return 0
    if n > 1:
        cp[0] = sup[0] / piv
    x[0] = rhs[0] / piv
    for j in range(1, n):
        piv = main[j] - sub[j - 1] * cp[j - 1]
        if abs(piv) < PIVOT_FLOOR:
            return j
        if j < n - 1:
            cp[j] = sup[j] / piv
        x[j] = (rhs[j] - sub[j - 1] * x[j - 1]) / piv
    for j in range(n - 2, -1, -1):
        x[j] -= cp[j] * x[j + 1]
    return -1


def solve_tridiagonal(system: TridiagonalSystem, scratch: np.ndarray | None = None,
                      out: np.ndarray | None = None) -> np.ndarray:
    """Solve a tridiagonal system in O(n) without pivoting.

    Parameters
    ----------
    system : TridiagonalSystem
        Assumed diagonally dominant; no row exchanges are performed.
    scratch : ndarray, optional
        Work buffer of length at least ``n`` for the modified super-diagonal.
        Pass one in to avoid an allocation per call inside iterative loops.
    out : ndarray, optional
        Destination for the solution. A fresh array is returned otherwise.

    Raises
    ------
    SingularSystemError
        If a pivot magnitude drops below ``1e-14``.
    """
    return solve_banded3(system.sub, system.main, system.sup, system.rhs, scratch, out)


def solve_banded3(sub, main, sup, rhs, scratch=None, out=None) -> np.ndarray:
    """Unchecked array-level entry point used by the solver's hot loop."""
    n = main.shape[0]
    if scratch is None:
        scratch = np.empty(n)
    if out is None:
        out = np.empty(n)
    bad = _thomas(np.asarray(sub, dtype=float), np.asarray(main, dtype=float),
                  np.asarray(sup, dtype=float), np.asarray(rhs, dtype=float), scratch, out)
    if bad >= 0:
        raise SingularSystemError(f"pivot below {PIVOT_FLOOR:g} at row {bad}; system is not diagonally dominant")
    return out
