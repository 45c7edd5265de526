"""Integration rules induced by the recovery operators.

Integrating a recovery expansion termwise turns each sample point's
reconstruction function into a scalar weight: the stencil weight times the
exact basis integral, accumulated over every (level, shift) touching the
point.  All weights are exact rationals, so "weights sum to one" is an
exact statement whenever the underlying operator reproduces constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Optional

import numpy as np

from . import faber
from .bspline import periodic_bspline_integral, shift_count
from .grids import GridVariant, cumulative_level_sets
from .laurent import wrap_unit
from .quasi_interp import QIScheme


@dataclass(frozen=True)
class CubatureRule:
    """Point/weight pairs with exact rational weights."""

    points: tuple[tuple[Fraction, ...], ...]
    weights: tuple[Fraction, ...]
    provenance: dict = field(default_factory=dict)
    reproduces_constants: bool = False

    def __post_init__(self):
        if len(self.points) != len(self.weights):
            raise ValueError("points and weights must align")

    @property
    def n_points(self) -> int:
        return len(self.points)

    def weight_sum(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    def weights_float(self) -> np.ndarray:
        return np.array([float(w) for w in self.weights])


def _finalize(acc: dict, provenance: dict, reproduces: bool) -> CubatureRule:
    items = sorted((pt, w) for pt, w in acc.items() if w)
    if not items:
        return CubatureRule((), (), provenance, reproduces)
    points, weights = zip(*items)
    return CubatureRule(tuple(points), tuple(weights), provenance, reproduces)


def derive_faber_rule(d: int, m: int, variant: GridVariant) -> CubatureRule:
    """Weights lambda_xi = integral of the point's hat combination."""
    table = faber.sample_weight_table(d, m, variant)
    acc: dict = {}
    for point, contribs in table.items():
        w = Fraction(0)
        for (k, _s), stencil_weight in contribs.items():
            w += stencil_weight * faber.hat_product_integral(k)
        acc[point] = w
    provenance = {"kind": "faber", "d": d, "m": m, "variant": variant.kind, "nu": variant.nu}
    return _finalize(acc, provenance, reproduces=variant.kind == "support_bounded")


def derive_qi_rule(scheme: QIScheme, d: int, m: int, nu: int) -> CubatureRule:
    """Same construction for a spline scheme: basis integral (2r 2^k)^{-1}."""
    acc: dict = {}
    for k in cumulative_level_sets(d, m, GridVariant.support_bounded(nu)):
        steps = [scheme.step(kj) for kj in k]
        counts = [shift_count(scheme.r, kj) for kj in k]
        basis_integral = Fraction(1)
        for kj in k:
            basis_integral *= periodic_bspline_integral(scheme.r, kj)
        for shifts in product(*[range(c) for c in counts]):
            polys = [scheme.axis_symbol(kj, sj).terms for kj, sj in zip(k, shifts)]
            for combo in product(*[list(p.items()) for p in polys]):
                weight = basis_integral
                point = []
                for j, (e, c) in enumerate(combo):
                    weight *= c
                    point.append(wrap_unit((shifts[j] + e) * steps[j]))
                pt = tuple(point)
                acc[pt] = acc.get(pt, Fraction(0)) + weight
    provenance = {"kind": "qi", "scheme": scheme.name or f"r{scheme.r}", "d": d, "m": m, "nu": nu}
    return _finalize(acc, provenance, reproduces=True)


def derive_rule(*, d: int, m: int, variant: GridVariant | None = None,
                scheme: QIScheme | None = None, nu: int | None = None) -> CubatureRule:
    """Rule for a configured recovery: hat-based if no scheme is given."""
    if scheme is not None:
        if nu is None:
            raise ValueError("scheme rules need nu")
        return derive_qi_rule(scheme, d, m, nu)
    if variant is None:
        raise ValueError("need a grid variant or a scheme")
    return derive_faber_rule(d, m, variant)


def integrate(rule: CubatureRule, f: Callable):
    """Weighted sum over the rule's points, in their sorted order.

    Points are passed to f with exact rational coordinates; if both f's
    values and the weights are exact the result is an exact rational.
    """
    total = 0
    for point, weight in zip(rule.points, rule.weights):
        total = total + weight * f(point)
    return total


def cubature_error_vs_sampling(rule: CubatureRule, recovered, f, true_integral,
                               *, p_grid_level: int = 9) -> tuple[float, float]:
    """(|I(f) - rule(f)|, ||f - recovered||_1): the first never exceeds the
    second up to quadrature tolerance when both come from the same operator.

    Raises if the rule's provenance does not match the recovery metadata.
    """
    meta = getattr(recovered, "meta", {})
    for key in ("d", "m", "nu"):
        if key in meta and key in rule.provenance and meta[key] != rule.provenance[key]:
            raise ValueError(f"rule/recovery mismatch on {key}: "
                             f"{rule.provenance[key]} vs {meta[key]}")
    estimate = float(integrate(rule, f))
    err_int = abs(float(true_integral) - estimate)
    d = rule.provenance.get("d", getattr(recovered, "d", None))
    err_l1 = faber.lp_error(f, recovered, d, 1, grid_level=p_grid_level)
    return err_int, err_l1
