"""Cardinal B-splines, their periodized dyadic dilates, and periodic hats.

Evaluation goes through per-order piecewise polynomials with exact rational
coefficients, so `Fraction` arguments give exact values (knot values are
exactly zero) while float arguments evaluate in double precision.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

from .laurent import wrap_unit


@lru_cache(maxsize=None)
def _pieces(order: int) -> tuple[tuple[Fraction, ...], ...]:
    """Polynomial pieces of M_order in local coordinates.

    Piece j covers [j, j+1); coefficients are ascending powers of the local
    variable u = x - j.  Built by the convolution recursion
    M_l(x) = integral of M_{l-1} over [x-1, x].
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if order == 1:
        return ((Fraction(1),),)
    prev = _pieces(order - 1)

    def antiderivative(coeffs):
        return (Fraction(0),) + tuple(c / (i + 1) for i, c in enumerate(coeffs))

    def poly_eval(coeffs, u):
        total = Fraction(0)
        for c in reversed(coeffs):
            total = total * u + c
        return total

    pieces = []
    for j in range(order):
        acc: dict[int, Fraction] = {}
        if j < order - 1:
            # integral of piece j from j to j+u
            for i, c in enumerate(antiderivative(prev[j])):
                acc[i] = acc.get(i, Fraction(0)) + c
        if j >= 1:
            # integral of piece j-1 from j-1+u to j
            anti = antiderivative(prev[j - 1])
            full = poly_eval(anti, Fraction(1))
            acc[0] = acc.get(0, Fraction(0)) + full
            for i, c in enumerate(anti):
                acc[i] = acc.get(i, Fraction(0)) - c
        top = max(acc) if acc else 0
        pieces.append(tuple(acc.get(i, Fraction(0)) for i in range(top + 1)))
    return tuple(pieces)


@lru_cache(maxsize=None)
def _pieces_float(order: int) -> np.ndarray:
    """Piece coefficients as a float matrix, row j = piece j, ascending powers."""
    pieces = _pieces(order)
    width = max(len(p) for p in pieces)
    mat = np.zeros((order, width))
    for j, p in enumerate(pieces):
        mat[j, : len(p)] = [float(c) for c in p]
    return mat


def cardinal_bspline(order: int, x):
    """M_order(x): the cardinal B-spline with support [0, order].

    Zero for x <= 0 and x >= order (including the knots themselves for
    order >= 2; the order-1 box is taken as the open-interval indicator so
    the zero-at-knots convention is uniform).
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    exact = isinstance(x, (int, Fraction))
    if x <= 0 or x >= order:
        return Fraction(0) if exact else 0.0
    if order == 1:
        return Fraction(1) if exact else 1.0
    j = int(x)  # 0 <= j <= order-1 here
    u = x - j
    total = Fraction(0) if exact else 0.0
    for c in reversed(_pieces(order)[j]):
        total = total * u + (c if exact else float(c))
    return total


def cardinal_bspline_many(order: int, x: np.ndarray) -> np.ndarray:
    """Vectorized M_order over a float array."""
    x = np.asarray(x, dtype=float)
    mat = _pieces_float(order)
    inside = (x > 0) & (x < order)
    j = np.clip(x.astype(int), 0, order - 1)
    u = x - j
    out = np.zeros_like(x)
    rows = mat[j[inside]]
    uu = u[inside]
    acc = np.zeros_like(uu)
    for col in range(mat.shape[1] - 1, -1, -1):
        acc = acc * uu + rows[:, col]
    out[inside] = acc
    return out


def shift_count(r: int, k: int) -> int:
    """|I(k)| = 2r * 2**k, the number of periodic B-spline shifts at level k."""
    return 2 * r * (1 << k)


def periodic_bspline(r: int, k: int, s: int, x):
    """N_{k,s}(x): 1-periodization of M_{2r}(2r 2^k x - s).

    The support has width 2^{-k} <= 1, so at most one period copy
    contributes.  Requires s in I(k) = {0, ..., 2r 2^k - 1}.
    """
    n = shift_count(r, k)
    if not 0 <= s < n:
        raise ValueError(f"shift {s} out of range for r={r}, k={k}")
    t = wrap_unit(x)
    y = n * t - s
    value = cardinal_bspline(2 * r, y)
    # wrapped copy for supports straddling the seam
    return value + cardinal_bspline(2 * r, y + n)


def periodic_bspline_integral(r: int, k: int) -> Fraction:
    """Integral of N_{k,s} over one period: (2r 2^k)^{-1}."""
    return Fraction(1, shift_count(r, k))


def hat_shift_count(k: int) -> int:
    """|Z(k)|: 1 at level 0, else 2^{k-1}."""
    return 1 if k == 0 else 1 << (k - 1)


def faber_hat(k: int, s: int, x):
    """Periodic hat phi_{k,s}.

    Level 0 is the constant 1.  For k >= 1 and s in Z(k) = {0,...,2^{k-1}-1}
    this is the periodization of M_2(2^k x - 2s): support
    [2s 2^{-k}, (2s+2) 2^{-k}], peak value 1 at the odd dyadic point
    (2s+1) 2^{-k}.
    """
    if k == 0:
        if s != 0:
            raise ValueError("level-0 hat has shift 0 only")
        return Fraction(1) if isinstance(x, (int, Fraction)) else 1.0
    if not 0 <= s < hat_shift_count(k):
        raise ValueError(f"shift {s} out of range for level {k}")
    t = wrap_unit(x)
    return cardinal_bspline(2, (1 << k) * t - 2 * s)


def faber_hat_integral(k: int) -> Fraction:
    """Integral of phi_{k,s} over one period: 1 at level 0, else 2^{-k}."""
    return Fraction(1) if k == 0 else Fraction(1, 1 << k)


def faber_hat_many(k: int, s, x: np.ndarray) -> np.ndarray:
    """Vectorized hat values; s may be an array aligned with x."""
    if k == 0:
        return np.ones_like(np.asarray(x, dtype=float))
    t = np.mod(np.asarray(x, dtype=float), 1.0)
    y = np.ldexp(t, k) - 2.0 * np.asarray(s) - 1.0
    return np.clip(1.0 - np.abs(y), 0.0, None)
