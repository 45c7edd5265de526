"""Even-order B-spline quasi-interpolation on the torus.

A scheme is a pair (r, Lambda): Lambda an even finite stencil applied on the
lattice of step h = (2r 2^k)^{-1}, producing spline expansions in the
periodized B-splines of order 2r.  The scheme is carried by exact Laurent
polynomials: the stencil symbol, its even/odd refinement residuals, and
their exact quotients by (z-1)^{2r}.  Hierarchical level components and the
sparse recovery operator follow from those symbols alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb
from typing import Callable, Iterator, Optional

import numpy as np

from .bspline import cardinal_bspline, cardinal_bspline_many, shift_count
from .grids import GridVariant, MultiIndex, cumulative_level_sets, index_support
from .laurent import LaurentPoly, difference_symbol, wrap_unit


class SchemeError(ValueError):
    """The stencil does not define a polynomial-reproducing scheme."""


@dataclass(frozen=True)
class QIScheme:
    """An even-order quasi-interpolation scheme and its derived symbols."""

    r: int
    lam: tuple[tuple[int, Fraction], ...]  # (offset, weight), offsets -mu..mu
    p_lambda: LaurentPoly
    p_even: LaurentPoly
    p_odd: LaurentPoly
    p_even_star: LaurentPoly
    p_odd_star: LaurentPoly
    name: Optional[str] = None

    @property
    def order(self) -> int:
        return 2 * self.r

    @property
    def mu(self) -> int:
        return max(abs(j) for j, _ in self.lam)

    @property
    def lambda_norm(self) -> Fraction:
        return sum((abs(c) for _, c in self.lam), Fraction(0))

    @property
    def star_norm_max(self) -> Fraction:
        return max(self.p_even_star.l1_norm(), self.p_odd_star.l1_norm())

    def step(self, k: int) -> Fraction:
        """Sampling step h at level k: (2r 2^k)^{-1}."""
        return Fraction(1, shift_count(self.r, k))

    def axis_symbol(self, k: int, s: int) -> LaurentPoly:
        """Coefficient symbol for one coordinate: the stencil symbol at
        level 0, else the even/odd residual by shift parity."""
        if k == 0:
            return self.p_lambda
        return self.p_even if s % 2 == 0 else self.p_odd

    def to_json_dict(self) -> dict:
        lam = dict(self.lam)
        half = [lam[j] for j in range(self.mu + 1)]
        return {"r": self.r, "lambda": [f"{c.numerator}/{c.denominator}" for c in half]}

    @classmethod
    def from_json_dict(cls, data) -> "QIScheme":
        half = [Fraction(c) for c in data["lambda"]]
        return build_scheme(int(data["r"]), half)


def build_scheme(r: int, lam, name: str | None = None) -> QIScheme:
    """Construct and validate a scheme from its stencil.

    `lam` is either the symmetric half (center weight first) or a full
    mapping offset -> weight.  The derived even/odd residual symbols must be
    exactly divisible by (z-1)^{2r}; a nonzero remainder, an asymmetric
    stencil, or a stencil that fails to reproduce constants is rejected.
    """
    if r < 1:
        raise SchemeError("need r >= 1")
    if isinstance(lam, dict):
        full = {int(j): Fraction(c) for j, c in lam.items()}
        for j, c in full.items():
            if full.get(-j, Fraction(0)) != c:
                raise SchemeError("stencil must be even: weight(-j) == weight(j)")
    else:
        half = [Fraction(c) for c in lam]
        if not half:
            raise SchemeError("empty stencil")
        full = {0: half[0]}
        for j, c in enumerate(half[1:], start=1):
            full[j] = c
            full[-j] = c
    mu = max(abs(j) for j in full)
    if mu < r - 1:
        raise SchemeError(f"stencil reach mu={mu} too small for r={r} (need mu >= r-1)")

    p_lambda = LaurentPoly({r + j: c for j, c in full.items()})
    if p_lambda(Fraction(1)) != 1:
        raise SchemeError("stencil weights must sum to 1 (reproduction of constants)")

    scale = Fraction(1, 1 << (2 * r - 1))
    even_mask = LaurentPoly({-2 * j: comb(2 * r, 2 * j) for j in range(r + 1)})
    odd_mask = LaurentPoly({-2 * j - 1: comb(2 * r, 2 * j + 1) for j in range(r)})
    p_sq = p_lambda.substitute_square()
    p_even = p_lambda - scale * (p_sq * even_mask)
    p_odd = p_lambda - scale * (p_sq * odd_mask)

    divisor = difference_symbol(2 * r)
    even_star, rem_even = p_even.divide_exact(divisor)
    odd_star, rem_odd = p_odd.divide_exact(divisor)
    if rem_even or rem_odd:
        raise SchemeError(
            "not a quasi-interpolation scheme: residual symbols are not "
            f"divisible by (z-1)^{2*r}"
        )
    lam_tuple = tuple(sorted(full.items()))
    return QIScheme(r, lam_tuple, p_lambda, p_even, p_odd, even_star, odd_star, name)


_BUILTIN_STENCILS = {
    "linear": (1, [Fraction(1)]),
    "cubic": (2, [Fraction(8, 6), Fraction(-1, 6)]),
    "quintic": (
        3,
        [
            Fraction(25150, 14400),
            Fraction(-5876, 14400),
            Fraction(448, 14400),
            Fraction(52, 14400),
            Fraction(1, 14400),
        ],
    ),
}


def named_scheme(name: str) -> QIScheme:
    """Built-in schemes: "linear" (r=1), "cubic" (r=2), "quintic" (r=3)."""
    try:
        r, half = _BUILTIN_STENCILS[name]
    except KeyError:
        raise SchemeError(f"unknown scheme {name!r}") from None
    return build_scheme(r, half, name=name)


@dataclass(frozen=True)
class SchemeConstants:
    """Error-bound ingredients of a scheme at given (alpha, p)."""

    a: float
    b: float            # grid maximum of the operator-norm profile
    b_bias: float       # Lipschitz bound on how far the true sup can exceed b
    lambda_norm: float  # crude upper bound sum |lambda(j)| >= b

    @property
    def b_upper(self) -> float:
        return min(self.b + self.b_bias, self.lambda_norm)


def operator_norm_profile(scheme: QIScheme, x: np.ndarray) -> np.ndarray:
    """sum_s |sum_j lambda(j) M_{2r}(x - j - s)| on the unit period."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    mu, order = scheme.mu, scheme.order
    for s in range(-mu - order, mu + 2):
        inner = np.zeros_like(x)
        for j, c in scheme.lam:
            inner += float(c) * cardinal_bspline_many(order, x - j - s)
        out += np.abs(inner)
    return out


def scheme_constants(scheme: QIScheme, alpha: float, p, *, grid: int = 1 << 22) -> SchemeConstants:
    """Compute a = (2r)^{-alpha} [r(p+1)]^{-1/p} max(star norms) exactly
    (converted to float) and the operator norm b by grid maximization.

    The profile is Lipschitz with constant at most 2 sum|lambda|, so the
    true sup exceeds the grid maximum by at most b_bias = Lip/(2 grid).
    """
    if not 0 < alpha <= scheme.order:
        raise ValueError(f"need 0 < alpha <= {scheme.order}")
    if p == np.inf or p == float("inf"):
        lp_factor = 1.0
    else:
        lp_factor = (scheme.r * (p + 1.0)) ** (-1.0 / p)
    a = (2.0 * scheme.r) ** (-alpha) * lp_factor * float(scheme.star_norm_max)
    xs = np.arange(grid, dtype=float) / grid
    profile = operator_norm_profile(scheme, xs)
    lam_norm = float(scheme.lambda_norm)
    lip = 2.0 * lam_norm
    return SchemeConstants(a=a, b=float(profile.max()), b_bias=lip / (2.0 * grid),
                           lambda_norm=lam_norm)


# ---- expansions ---------------------------------------------------------


class QIExpansion:
    """A finite expansion sum c_{k,s} prod_j N_{k_j,s_j} for one scheme."""

    def __init__(self, scheme: QIScheme, d: int,
                 levels: dict[MultiIndex, np.ndarray], meta: dict | None = None):
        self.scheme = scheme
        self.d = d
        self.levels = levels
        self.meta = dict(meta or {})

    @property
    def n_terms(self) -> int:
        return sum(arr.size for arr in self.levels.values())

    def __call__(self, x) -> float:
        if len(x) != self.d:
            raise ValueError("dimension mismatch")
        r = self.scheme.r
        t = [wrap_unit(float(c)) for c in x]
        total = 0.0
        for k, arr in self.levels.items():
            n = [shift_count(r, kj) for kj in k]
            y = [n[j] * t[j] for j in range(self.d)]
            base = [int(y[j]) for j in range(self.d)]
            frac = [y[j] - base[j] for j in range(self.d)]
            for offsets in product(range(2 * r), repeat=self.d):
                weight = 1.0
                idx = []
                for j, off in enumerate(offsets):
                    weight *= cardinal_bspline(2 * r, frac[j] + off)
                    idx.append((base[j] - off) % n[j])
                if weight:
                    total += weight * float(arr[tuple(idx)])
        return total

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        t = np.mod(X, 1.0)
        r = self.scheme.r
        order = 2 * r
        total = np.zeros(len(t))
        # spline piece values for arguments frac + off, off = 0..2r-1
        for k, arr in self.levels.items():
            n = [shift_count(r, kj) for kj in k]
            y = [t[:, j] * n[j] for j in range(self.d)]
            base = [yj.astype(np.intp) for yj in y]
            frac = [y[j] - base[j] for j in range(self.d)]
            spline_vals = [
                np.stack([cardinal_bspline_many(order, frac[j] + off)
                          for off in range(order)])
                for j in range(self.d)
            ]
            for offsets in product(range(order), repeat=self.d):
                weight = spline_vals[0][offsets[0]]
                idx = [(base[0] - offsets[0]) % n[0]]
                for j in range(1, self.d):
                    weight = weight * spline_vals[j][offsets[j]]
                    idx.append((base[j] - offsets[j]) % n[j])
                total += weight * arr[tuple(idx)]
        return total


def _axis_terms(poly: LaurentPoly) -> list[tuple[int, float]]:
    return [(e, float(c)) for e, c in poly.terms.items()]


def _sample_lattice(scheme: QIScheme, k: MultiIndex) -> list[np.ndarray]:
    r = scheme.r
    return [np.arange(shift_count(r, kj)) / float(shift_count(r, kj)) for kj in k]


def _level_samples(scheme: QIScheme, f, k: MultiIndex, cache: Optional[dict]) -> np.ndarray:
    """Values of f on the level-k sampling lattice, shape prod(2r 2^{k_j})."""
    r = scheme.r
    many = getattr(f, "evaluate_many", None)
    if many is not None and cache is None:
        axes = _sample_lattice(scheme, k)
        grids = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        return np.asarray(many(pts), dtype=float).reshape([len(a) for a in axes])
    steps = [scheme.step(kj) for kj in k]
    shape = tuple(shift_count(r, kj) for kj in k)
    out = np.empty(shape)
    for idx in product(*[range(n) for n in shape]):
        point = tuple(wrap_unit(i * h) for i, h in zip(idx, steps))
        if cache is not None and point in cache:
            out[idx] = cache[point]
        else:
            value = float(f(point))
            if cache is not None:
                cache[point] = value
            out[idx] = value
    return out


def _apply_axis_symbol(values: np.ndarray, axis: int, poly: LaurentPoly) -> np.ndarray:
    out = np.zeros_like(values)
    for e, c in _axis_terms(poly):
        out += c * np.roll(values, -e, axis=axis)
    return out


def level_coefficients(scheme: QIScheme, f, k: MultiIndex, *, cache: Optional[dict] = None) -> np.ndarray:
    """Hierarchical component coefficients c_{k,s} for all shifts at level k.

    Per coordinate the sampled values are correlated with the axis symbol:
    the full stencil symbol at level 0, else the even/odd refinement
    residual chosen by the parity of the shift.
    """
    values = _level_samples(scheme, f, k, cache)
    for axis, kj in enumerate(k):
        if kj == 0:
            values = _apply_axis_symbol(values, axis, scheme.p_lambda)
            continue
        even = _apply_axis_symbol(values, axis, scheme.p_even)
        odd = _apply_axis_symbol(values, axis, scheme.p_odd)
        parity = np.arange(values.shape[axis]) % 2
        shape = [1] * values.ndim
        shape[axis] = -1
        values = np.where(parity.reshape(shape) == 0, even, odd)
    return values


def full_operator_coefficients(scheme: QIScheme, f, k: MultiIndex, *, cache: Optional[dict] = None) -> np.ndarray:
    """Direct (non-hierarchical) operator coefficients a_{k,s} at level k."""
    values = _level_samples(scheme, f, k, cache)
    for axis in range(len(k)):
        values = _apply_axis_symbol(values, axis, scheme.p_lambda)
    return values


def qi_level_operator(scheme: QIScheme, f, k: MultiIndex) -> QIExpansion:
    """The full tensor operator Q_k as an evaluable expansion."""
    arr = full_operator_coefficients(scheme, f, k)
    return QIExpansion(scheme, len(k), {k: arr}, {"kind": "full_operator", "k": k})


def qi_component(scheme: QIScheme, f, k: MultiIndex) -> QIExpansion:
    """The hierarchical level component as an evaluable expansion."""
    arr = level_coefficients(scheme, f, k)
    return QIExpansion(scheme, len(k), {k: arr}, {"kind": "component", "k": k})


def recover_qi(scheme: QIScheme, f, d: int, m: int, nu: int,
               *, exact_sampling: bool = False) -> QIExpansion:
    """Sparse recovery: sum of level components over |supp k| <= nu, |k|_1 <= m.

    Samples lie on the step-h lattices refining the support-bounded grid.
    `exact_sampling` funnels every sample through a shared cache keyed by
    exact rational coordinates (slower; useful when f is expensive or exact).
    """
    if not 1 <= nu <= d:
        raise ValueError("need 1 <= nu <= d")
    cache: Optional[dict] = {} if exact_sampling or not hasattr(f, "evaluate_many") else None
    levels = {}
    for k in cumulative_level_sets(d, m, GridVariant.support_bounded(nu)):
        levels[k] = level_coefficients(scheme, f, k, cache=cache)
    meta = {"variant": "qi", "d": d, "m": m, "nu": nu, "scheme": scheme.name or f"r{scheme.r}"}
    if cache is not None:
        meta["sample_count"] = len(cache)
    return QIExpansion(scheme, d, levels, meta)


def component_lp_norm(expansion: QIExpansion, k: MultiIndex, p, *, samples_per_cell: int = 9) -> float:
    """L_p norm of one level of an expansion by cell-wise midpoint sampling."""
    arr = expansion.levels[k]
    single = QIExpansion(expansion.scheme, expansion.d, {k: arr})
    r = expansion.scheme.r
    axes = []
    for kj in k:
        n = shift_count(r, kj)
        offs = (2 * np.arange(samples_per_cell) + 1) / (2 * samples_per_cell)
        axes.append(((np.arange(n)[:, None] + offs[None, :]) / n).ravel())
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    vals = np.abs(single.evaluate_many(pts))
    if p == np.inf or p == float("inf"):
        return float(vals.max())
    return float(np.mean(vals**p) ** (1.0 / p))


def component_decay_bound(constants: SchemeConstants, alpha: float, d: int,
                          k: MultiIndex, seminorm: float) -> float:
    """Level-norm bound a^{|u|} b^{d-|u|} 2^{-alpha |k|_1} * seminorm."""
    u = len(index_support(k))
    return constants.a**u * constants.b_upper ** (d - u) * 2.0 ** (-alpha * sum(k)) * seminorm


def coefficient_decay_check(scheme: QIScheme, f, seminorm_bound: float,
                            k: MultiIndex, p, alpha: float) -> tuple[bool, float, float]:
    """Measure ||q_k(f)||_p and compare with the decay bound.

    Returns (within_bound, measured, bound).
    """
    d = len(k)
    expansion = qi_component(scheme, f, k)
    measured = component_lp_norm(expansion, k, p)
    constants = scheme_constants(scheme, alpha, p, grid=1 << 16)
    bound = component_decay_bound(constants, alpha, d, k, seminorm_bound)
    return measured <= bound * (1 + 1e-9), measured, bound


def qi_sample_points(scheme: QIScheme, d: int, m: int, nu: int) -> set:
    """Exact coordinates of every lattice sample the recovery reads."""
    points = set()
    for k in cumulative_level_sets(d, m, GridVariant.support_bounded(nu)):
        steps = [scheme.step(kj) for kj in k]
        shape = [shift_count(scheme.r, kj) for kj in k]
        for idx in product(*[range(n) for n in shape]):
            points.add(tuple(wrap_unit(i * h) for i, h in zip(idx, steps)))
    return points
