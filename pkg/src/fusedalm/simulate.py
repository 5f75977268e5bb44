"""Seeded piecewise-constant test signals with Gaussian or Student-t noise."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

LEVELS = (0.0, 1.0, 2.0)


@dataclass(frozen=True)
class NoiseModel:
    kind: str = "gaussian"
    variance: float = 0.1
    df: float = 2.0
    scale: float = 0.3

    def __post_init__(self):
        if self.kind not in ("gaussian", "student_t"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind == "gaussian" and not self.variance > 0:
            raise ValueError("variance must be positive")
        if self.kind == "student_t" and not (self.df > 0 and self.scale > 0):
            raise ValueError("df and scale must be positive")

    @classmethod
    def gaussian(cls, variance: float = 0.1) -> NoiseModel:
        return cls("gaussian", variance=variance)

    @classmethod
    def student_t(cls, df: float = 2.0, scale: float = 0.3) -> NoiseModel:
        return cls("student_t", df=df, scale=scale)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == "gaussian":
            return np.sqrt(self.variance) * rng.standard_normal(n)
        return self.scale * rng.standard_t(self.df, n)


@dataclass(frozen=True)
class SignalSpec:
    """Layout and noise of a synthetic signal.

    ``fractions`` are the target occupancies of levels 1 and 2; level 0
    takes the remainder. ``min_block_length`` defaults to ``max(5, n // 50)``.
    """

    n: int
    seed: int = 0
    noise: NoiseModel = field(default_factory=NoiseModel)
    fractions: tuple[float, float] = (0.2, 0.2)
    min_block_length: int | None = None

    def __post_init__(self):
        if self.min_block_length is None:
            object.__setattr__(self, "min_block_length", max(5, self.n // 50))
        f1, f2 = self.fractions
        if not (0 <= f1 <= 1 and 0 <= f2 <= 1 and f1 + f2 <= 1):
            raise ValueError("fractions must lie in [0, 1] and sum to at most 1")
        if self.min_block_length < 1:
            raise ValueError("min_block_length must be positive")
        if self.n < 2 * self.min_block_length:
            raise ValueError(
                f"n={self.n} is shorter than two minimum blocks ({2 * self.min_block_length})"
            )
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def _layout(spec: SignalSpec, rng: np.random.Generator) -> np.ndarray:
    m = spec.min_block_length
    n = spec.n
    f1, f2 = spec.fractions
    deficit = np.array([1.0 - f1 - f2, f1, f2]) * n
    truth = np.empty(n)
    pos = 0
    while pos < n:
        left = n - pos
        length = int(rng.integers(m, 3 * m, endpoint=True))
        if left - length < m:
            length = left
        # weight levels by how far each still is from its target share,
        # preferring levels that can absorb a whole minimum block
        roomy = deficit >= m
        w = np.where(roomy, deficit, 0.0) if roomy.any() else np.maximum(deficit, 0.0)
        if w.sum() <= 0:
            w = np.ones(3)
        level = int(rng.choice(3, p=w / w.sum()))
        if length < left and deficit[level] >= m:
            length = int(min(length, deficit[level]))
            if left - length < m:
                length = left
        truth[pos:pos + length] = LEVELS[level]
        deficit[level] -= length
        pos += length
    return truth


def generate(spec: SignalSpec) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(truth, noisy)``; identical specs give bit-identical arrays."""
    rng = np.random.default_rng(spec.seed)
    truth = _layout(spec, rng)
    noisy = truth + spec.noise.sample(rng, spec.n)
    return truth, noisy


def block_lengths(truth: np.ndarray) -> np.ndarray:
    """Lengths of maximal runs of equal values."""
    edges = np.flatnonzero(np.diff(truth)) + 1
    return np.diff(np.concatenate(([0], edges, [len(truth)])))
