"""Built-in test functions with certified smoothness budgets.

Each member carries an evaluator, its exact integral, and a certified upper
bound on the mixed-difference seminorm: for a separable product the mixed
difference factors, so the bound is a product of per-coordinate profiles
sup_h h^{-alpha} sup_x |difference|, maximized over coordinate subsets.
Numeric profiles are maximized over a dense (h, x) lattice and inflated by
a 1.1 safety factor; the sine profile uses its exact amplitude formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Callable, Optional, Sequence

import numpy as np

from .bspline import cardinal_bspline_many, faber_hat, faber_hat_integral, faber_hat_many
from .bspline import periodic_bspline, periodic_bspline_integral
from .quasi_interp import QIScheme

SAFETY = 1.1


@lru_cache(maxsize=None)
def sine_factor_profile(alpha: float, order: int) -> float:
    """sup_h h^{-alpha} sup_x |order-th difference of sin(2 pi x)|.

    The inner sup is exactly (2 sin(pi h))^order; the outer sup is taken on
    a dense h-grid, plus the h -> 0 limit (2 pi)^order when alpha = order.
    """
    if not 0 < alpha <= order:
        raise ValueError("need 0 < alpha <= order")
    h = np.linspace(1e-8, 1.0, 400_001)
    ratio = (2.0 * np.abs(np.sin(np.pi * h))) ** order / h**alpha
    best = float(ratio.max())
    if alpha == order:
        best = max(best, (2.0 * math.pi) ** order)
    return best * SAFETY


@lru_cache(maxsize=None)
def numeric_factor_profile(factor_name: str, alpha: float, order: int,
                           x_points: int = 4096, h_points: int = 2000) -> float:
    """Dense-lattice estimate of sup_h h^{-alpha} sup_x |difference| for a
    named periodic factor, inflated by the safety margin."""
    factor = _FACTORS[factor_name]
    x = np.arange(x_points) / x_points
    hs = np.concatenate([
        np.linspace(1.0 / h_points, 1.0, h_points),
        2.0 ** (-np.linspace(1.0, 24.0, 200)),
    ])
    signs = np.array([comb(order, j) * (-1) ** (order - j) for j in range(order + 1)])
    best = 0.0
    for h in hs:
        acc = np.zeros_like(x)
        for j, w in enumerate(signs):
            acc += w * factor(x + j * h)
        best = max(best, float(np.abs(acc).max()) / h**alpha)
    return best * SAFETY


def _bump_factor(x: np.ndarray) -> np.ndarray:
    return cardinal_bspline_many(4, 4.0 * np.mod(x, 1.0))


_FACTORS = {"bump4": _bump_factor}


@dataclass
class CorpusFunction:
    """A named 1-periodic test function with certified metadata."""

    name: str
    d: int
    scalar: Callable
    vector: Optional[Callable] = None
    true_integral: object = 0
    active: tuple[int, ...] = ()
    zero_boundary: bool = False
    certified_alpha: float = 2.0
    seminorm: Optional[Callable[[float, int], float]] = None
    notes: str = ""

    def __call__(self, point):
        return self.scalar(point)

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if self.vector is not None:
            return self.vector(X)
        return np.array([float(self.scalar(tuple(row))) for row in X])

    def seminorm_bound(self, alpha: float, order: int) -> float:
        """Certified upper bound on the mixed-difference seminorm, maximized
        over coordinate subsets (the subset-free bound is the sup norm)."""
        if self.seminorm is None:
            raise ValueError(f"{self.name} carries no seminorm certificate")
        return self.seminorm(alpha, order)

    def normalized(self, alpha: float, order: int) -> "CorpusFunction":
        """Scaled copy with certified seminorm at most 1."""
        c = self.seminorm_bound(alpha, order)
        if c <= 0:
            raise ValueError("degenerate seminorm")
        scale = 1.0 / c
        scalar = self.scalar
        vector = self.vector
        return CorpusFunction(
            name=f"{self.name}/unit",
            d=self.d,
            scalar=lambda pt: scale * scalar(pt),
            vector=None if vector is None else (lambda X: scale * vector(X)),
            true_integral=float(self.true_integral) * scale,
            active=self.active,
            zero_boundary=self.zero_boundary,
            certified_alpha=self.certified_alpha,
            seminorm=lambda a, o: 1.0 if (a, o) == (alpha, order) else self.seminorm(a, o) * scale,
            notes=self.notes,
        )


def _separable_seminorm(n_active: int, factor_sup: float,
                        profile: Callable[[float, int], float]) -> Callable[[float, int], float]:
    def bound(alpha: float, order: int) -> float:
        s = profile(alpha, order)
        best = 1.0 if n_active == 0 else 0.0
        for t in range(0, n_active + 1):
            best = max(best, s**t * factor_sup ** (n_active - t))
        return best

    return bound


def constant(d: int, value: float = 1.0) -> CorpusFunction:
    return CorpusFunction(
        name="constant",
        d=d,
        scalar=lambda pt: value,
        vector=lambda X: np.full(len(X), value),
        true_integral=Fraction(value) if float(value).is_integer() else value,
        active=(),
        certified_alpha=2.0,
        seminorm=lambda alpha, order: abs(value) if value else 1.0,
        notes="differences vanish identically",
    )


def prodsine(d: int) -> CorpusFunction:
    def scalar(pt):
        out = 1.0
        for c in pt:
            out *= math.sin(2.0 * math.pi * float(c))
        return out

    def vector(X):
        return np.prod(np.sin(2.0 * np.pi * X), axis=1)

    return CorpusFunction(
        name="prodsine",
        d=d,
        scalar=scalar,
        vector=vector,
        true_integral=Fraction(0),
        active=tuple(range(d)),
        zero_boundary=True,
        certified_alpha=2.0,
        seminorm=_separable_seminorm(d, 1.0, sine_factor_profile),
        notes="product of sines; vanishes on every coordinate hyperplane",
    )


def few_active(d: int, nu: int) -> CorpusFunction:
    if not 1 <= nu <= d:
        raise ValueError("need 1 <= nu <= d")

    def scalar(pt):
        out = 1.0
        for c in pt[:nu]:
            out *= math.sin(2.0 * math.pi * float(c))
        return out

    def vector(X):
        return np.prod(np.sin(2.0 * np.pi * X[:, :nu]), axis=1)

    return CorpusFunction(
        name="few_active",
        d=d,
        scalar=scalar,
        vector=vector,
        true_integral=Fraction(0),
        active=tuple(range(nu)),
        certified_alpha=2.0,
        seminorm=_separable_seminorm(nu, 1.0, sine_factor_profile),
        notes=f"depends on the first {nu} coordinates only",
    )


def zero_boundary_bump(d: int) -> CorpusFunction:
    from .witness import bump

    def scalar(pt):
        out = 1
        for c in pt:
            out = out * bump(0, 0, c)
        return out

    def vector(X):
        out = np.ones(len(X))
        for j in range(X.shape[1]):
            out *= _bump_factor(X[:, j])
        return out

    return CorpusFunction(
        name="zbump",
        d=d,
        scalar=scalar,
        vector=vector,
        true_integral=Fraction(1, 4**d),
        active=tuple(range(d)),
        zero_boundary=True,
        certified_alpha=2.0,
        seminorm=_separable_seminorm(
            d, 2.0 / 3.0, lambda a, o: numeric_factor_profile("bump4", a, o)
        ),
        notes="product of one-bump tilings; exactly zero on the boundary",
    )


def single_hat(d: int, k: Sequence[int], s: Sequence[int]) -> CorpusFunction:
    k = tuple(k)
    s = tuple(s)

    def scalar(pt):
        out = 1
        for kj, sj, c in zip(k, s, pt):
            out = out * faber_hat(kj, sj, c)
        return out

    def vector(X):
        out = np.ones(len(X))
        for j, (kj, sj) in enumerate(zip(k, s)):
            out *= faber_hat_many(kj, sj, X[:, j])
        return out

    integral = Fraction(1)
    for kj in k:
        integral *= faber_hat_integral(kj)
    return CorpusFunction(
        name=f"hat{list(k)}",
        d=d,
        scalar=scalar,
        vector=vector,
        true_integral=integral,
        active=tuple(j for j, kj in enumerate(k) if kj),
        certified_alpha=1.0,
        seminorm=None,
        notes="member of the hat recovery span",
    )


def single_bspline(scheme: QIScheme, d: int, k: Sequence[int], s: Sequence[int]) -> CorpusFunction:
    k = tuple(k)
    s = tuple(s)

    def scalar(pt):
        out = 1
        for kj, sj, c in zip(k, s, pt):
            out = out * periodic_bspline(scheme.r, kj, sj, c)
        return out

    integral = Fraction(1)
    for kj in k:
        integral *= periodic_bspline_integral(scheme.r, kj)
    return CorpusFunction(
        name=f"bspline{list(k)}",
        d=d,
        scalar=scalar,
        vector=None,
        true_integral=integral,
        active=tuple(range(d)),
        certified_alpha=float(2 * scheme.r - 1),
        seminorm=None,
        notes="member of the scheme's expansion span",
    )


def standard_corpus(d: int) -> dict[str, CorpusFunction]:
    """The default experiment set at dimension d."""
    members = {
        "constant": constant(d),
        "prodsine": prodsine(d),
        "zbump": zero_boundary_bump(d),
        "hat": single_hat(d, (1,) * d, (0,) * d),
    }
    if d >= 2:
        members["few_active"] = few_active(d, max(1, d // 2))
    return members
