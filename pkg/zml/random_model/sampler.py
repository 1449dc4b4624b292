"""Counter-based unit-circle samples.

The angle of X(p) in trial n is a pure function of (seed, p, n): each
prime owns a Philox stream keyed by (p, seed), and trial n reads the
n-th double of that stream. Chunks of trials can therefore be drawn in
any order, by any number of workers, with identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from zml.errors import DomainError

_WORDS_PER_BLOCK = 4
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class UnitSampler:
    seed: int

    def __post_init__(self) -> None:
        if not 0 <= self.seed <= _MASK64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def _generator(self, p: int, start: int) -> tuple[np.random.Generator, int]:
        key = (int(p) << 64) | self.seed
        bit = np.random.Philox(key=key, counter=start // _WORDS_PER_BLOCK)
        return np.random.Generator(bit), start % _WORDS_PER_BLOCK

    def uniforms(self, p: int, start: int, count: int) -> np.ndarray:
        """Doubles in [0, 1) for trials start .. start + count - 1 of prime p."""
        if start < 0 or count < 0:
            raise DomainError(f"invalid trial range start={start} count={count}")
        gen, skip = self._generator(p, start)
        return gen.random(skip + count)[skip:]

    def angles(self, primes, start: int, count: int) -> np.ndarray:
        """Angles in [0, 2 pi), shape (count, len(primes))."""
        primes = np.atleast_1d(np.asarray(primes, dtype=np.int64))
        out = np.empty((count, primes.size))
        for col, p in enumerate(primes):
            out[:, col] = self.uniforms(int(p), start, count)
        return 2 * math.pi * out

    def units(self, primes, start: int, count: int) -> np.ndarray:
        """X(p) = e^{i angle}, shape (count, len(primes))."""
        return np.exp(1j * self.angles(primes, start, count))

    def to_dict(self) -> dict:
        return {"seed": self.seed, "generator": "philox4x64", "key": "(prime << 64) | seed"}
