"""Finitely supported refinement masks and their JSON form."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

__all__ = ["Mask", "parse_number", "format_number"]


def parse_number(v):
    """Read a JSON scalar: int, float, ``[num, den]`` pair or ``"a/b"`` string."""
    if isinstance(v, bool):
        raise ValueError("booleans are not numbers here")
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"fraction must be a [num, den] pair, got {v!r}")
        return Fraction(int(v[0]), int(v[1]))
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, (int, Rational)):
        return Fraction(v)
    return float(v)


def format_number(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else [v.numerator, v.denominator]
    return float(f"{float(v):.12g}")


@dataclass(frozen=True)
class Mask:
    """Coefficients ``c_k`` of a refinement equation.

    ``coefficients`` maps integer tuples to ``Fraction`` (exact) or ``float``.
    Zero coefficients are dropped on construction.
    """

    coefficients: dict

    def __post_init__(self):
        clean = {}
        for k, v in self.coefficients.items():
            key = tuple(int(x) for x in np.atleast_1d(k))
            if v != 0:
                clean[key] = clean.get(key, 0) + v
        clean = {k: v for k, v in clean.items() if v != 0}
        if not clean:
            raise ValueError("mask has no nonzero coefficient")
        dims = {len(k) for k in clean}
        if len(dims) != 1:
            raise ValueError("mask indices of different dimensions")
        object.__setattr__(self, "coefficients", dict(sorted(clean.items())))

    @classmethod
    def from_arrays(cls, support, values):
        support = np.asarray(support).reshape(len(values), -1)
        return cls({tuple(k): v for k, v in zip(support.tolist(), values)})

    @property
    def n(self) -> int:
        return len(next(iter(self.coefficients)))

    @property
    def support(self) -> np.ndarray:
        return np.array(list(self.coefficients), dtype=np.int64).reshape(-1, self.n)

    @property
    def values(self) -> np.ndarray:
        return np.array([float(v) for v in self.coefficients.values()])

    @property
    def total(self):
        return sum(self.coefficients.values())

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.coefficients.values())

    def __len__(self):
        return len(self.coefficients)

    def __getitem__(self, k):
        return self.coefficients.get(tuple(k), 0)

    def scaled(self, factor) -> "Mask":
        return Mask({k: v * factor for k, v in self.coefficients.items()})

    def check_normalization(self, m: int, rtol: float = 1e-9) -> bool:
        return abs(float(self.total) - m) <= rtol * m

    def symbol(self, xi) -> np.ndarray:
        """``c(xi) = sum_k c_k exp(-2 pi i (k, xi))`` at rows of ``xi``."""
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        return np.exp(-2j * np.pi * xi @ self.support.T) @ self.values

    def to_json(self):
        return [{"index": list(k), "value": format_number(v)}
                for k, v in self.coefficients.items()]

    @classmethod
    def from_json(cls, data):
        return cls({tuple(e["index"]): parse_number(e["value"]) for e in data})
