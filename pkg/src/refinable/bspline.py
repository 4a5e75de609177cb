"""Tile masks, tile B-spline masks and mask convolution."""

from __future__ import annotations

from fractions import Fraction

from .lattice import DigitSet
from .mask import Mask

__all__ = ["tile_mask", "bspline_mask", "convolve_masks"]


def _digits(D):
    return [tuple(d) for d in (D.digits if isinstance(D, DigitSet) else D)]


def tile_mask(D) -> Mask:
    """Mask of the tile indicator: ``c_d = 1`` for every digit ``d``."""
    return Mask({d: Fraction(1) for d in _digits(D)})


def _convolve(a: dict, b: dict) -> dict:
    out = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            out[k] = out.get(k, 0) + va * vb
    return out


def convolve_masks(a: Mask, b: Mask, m: int | None = None) -> Mask:
    """Mask of the convolution of two refinable functions with the same M.

    The coefficient convolution is divided by ``m`` so that the result sums
    to ``m`` again.  ``m`` defaults to the common coefficient sum.
    """
    if m is None:
        m = a.total
    m = Fraction(m) if isinstance(m, (int, Fraction)) else float(m)
    return Mask(_convolve(a.coefficients, b.coefficients)).scaled(1 / m)


def bspline_mask(D, order: int) -> Mask:
    """Mask of the tile B-spline of the given order.

    This is ``m (c_0 / m)^{order+1}`` where ``c_0`` is the tile mask; the
    coefficients are exact rationals supported on the ``(order+1)``-fold
    sumset of the digits.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    base = tile_mask(D)
    m = len(base)
    out = base
    for _ in range(order):
        out = convolve_masks(out, base, m)
    return out
