"""Finite probability mass functions on labeled alphabets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

PROB_SUM_TOL = 1e-9


class AlphabetMismatchError(ValueError):
    """Raised when two pmfs defined on different alphabets are combined."""


@dataclass(frozen=True)
class FinitePmf:
    """A probability mass function on a finite labeled alphabet.

    Symbols are opaque hashable labels. Probabilities must be non-negative
    and sum to one within ``PROB_SUM_TOL``; they are renormalized exactly
    on construction so downstream sums are consistent.
    """

    symbols: Tuple
    probs: Tuple[float, ...]

    def __post_init__(self):
        symbols = tuple(self.symbols)
        probs = tuple(float(p) for p in self.probs)
        if len(symbols) != len(probs):
            raise ValueError("symbols and probs must have equal length")
        if len(symbols) == 0:
            raise ValueError("pmf needs a non-empty alphabet")
        if len(set(symbols)) != len(symbols):
            raise ValueError("alphabet symbols must be distinct")
        if any(p < 0.0 for p in probs):
            raise ValueError("probabilities must be non-negative")
        total = math.fsum(probs)
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {total}, not 1")
        probs = tuple(p / total for p in probs)
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, symbols: Sequence) -> "FinitePmf":
        n = len(symbols)
        return cls(tuple(symbols), (1.0 / n,) * n)

    @property
    def size(self) -> int:
        return len(self.symbols)

    @property
    def strictly_positive(self) -> bool:
        return all(p > 0.0 for p in self.probs)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    def same_alphabet(self, other: "FinitePmf") -> bool:
        return self.symbols == other.symbols

    def require_same_alphabet(self, other: "FinitePmf") -> None:
        if not self.same_alphabet(other):
            raise AlphabetMismatchError(
                f"alphabets differ: {self.symbols} vs {other.symbols}"
            )
