"""Closed-form error constants and bound expressions.

Every quantity here is a finite combinatorial expression; integer
combinatorics stay exact and are converted to floating point last.  When
alpha is an integer the 2^alpha - 1 factors are kept as exact rationals, so
sandwich comparisons at alpha in {1, 2} are exact.

Name disambiguation (three unrelated b's): `b_n` is the tail-comparison
function of the generating-function lemma, `bound_b_faber` the constant
2(2^alpha - 1)(p+1)^{1/p} appearing in hat-basis m-power bounds, and the
scheme operator norm is carried separately by SchemeConstants.b.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, exp, inf, isinf
from typing import Optional, Union

Real = Union[int, float, Fraction]


class BoundHypothesisError(ValueError):
    """A bound expression was requested outside its stated hypotheses."""


def p_factor(p) -> float:
    """(p+1)^{1/p}, with the limit convention 1 at p = inf."""
    if p == inf:
        return 1.0
    if p <= 0:
        raise ValueError("p must be positive")
    return (p + 1.0) ** (1.0 / p)


def two_pow_alpha_minus_1(alpha) -> Real:
    """2^alpha - 1, exact when alpha is a nonnegative integer."""
    if float(alpha).is_integer() and alpha >= 0:
        return Fraction(2 ** int(alpha) - 1)
    return 2.0**alpha - 1.0


def decay_ratio(alpha) -> Real:
    """t = 2^{-alpha}, exact for integer alpha."""
    if float(alpha).is_integer() and alpha >= 0:
        return Fraction(1, 2 ** int(alpha))
    return 2.0 ** (-alpha)


def tail_series(m: int, n: int, t):
    """F(m, n, t) = sum_{s>=0} C(m+s, n) t^s via the closed form
    (1-t)^{-1} sum_{s=0}^{n} C(m, s) (t/(1-t))^{n-s}.

    Requires m >= n >= 0 and 0 < t < 1; exact for Fraction t.
    """
    if not (m >= n >= 0):
        raise ValueError("need m >= n >= 0")
    if not 0 < t < 1:
        raise ValueError("need t in (0, 1)")
    ratio = t / (1 - t)
    total = 0
    for s in range(n + 1):
        total += comb(m, s) * ratio ** (n - s)
    return total / (1 - t)


def b_n(n: int, t):
    """Tail comparison factor: (1-2t)^{-1} for t < 1/2, 2(n+1) at t = 1/2,
    (2t-1)^{-1} (t/(1-t))^{n+1} for t > 1/2."""
    if not 0 < t < 1:
        raise ValueError("need t in (0, 1)")
    half = Fraction(1, 2)
    if t < half:
        return 1 / (1 - 2 * t)
    if t == half:
        return 2 * (n + 1)
    return (t / (1 - t)) ** (n + 1) / (2 * t - 1)


def beta(alpha, l: int, m: int):
    """(2^alpha-1)^{-l} sum_{s=0}^{l-1} C(m, s) (2^alpha-1)^s; beta(_, 0, _) = 1."""
    if l < 0:
        raise ValueError("need l >= 0")
    if l == 0:
        return Fraction(1)
    if m < l - 1:
        raise BoundHypothesisError(f"beta needs m >= l-1, got l={l}, m={m}")
    c = two_pow_alpha_minus_1(alpha)
    total = sum(comb(m, s) * c**s for s in range(l))
    return total / c**l


def gamma(alpha, p, nu: int, m: int):
    """sum_{l=0}^{nu} C(nu, l) 2^{-l} (p+1)^{-l/p} beta(alpha, l, m)."""
    pf = p_factor(p)
    return sum(
        comb(nu, l) * Fraction(1, 2**l) * pf ** (-l) * beta(alpha, l, m)
        for l in range(nu + 1)
    )


def gamma_prime(alpha, nu: int, m: int, *, include_empty: bool = True):
    """sum_l C(nu, l) 2^{-7l} beta(alpha, l, m), from l = 0 as displayed.

    With include_empty=False the sum starts at l = 1, the form the witness
    construction actually attains.
    """
    start = 0 if include_empty else 1
    return sum(
        comb(nu, l) * Fraction(1, 2 ** (7 * l)) * beta(alpha, l, m)
        for l in range(start, nu + 1)
    )


def delta(alpha, nu: int, a: float, b: float, m: int) -> float:
    """sum_l C(nu, l) a^l b^{nu-l} beta(alpha, l, m)."""
    return float(
        sum(comb(nu, l) * a**l * b ** (nu - l) * float(beta(alpha, l, m)) for l in range(nu + 1))
    )


def bound_b_faber(alpha, p) -> float:
    """2 (2^alpha - 1) (p+1)^{1/p}."""
    return 2.0 * float(two_pow_alpha_minus_1(alpha)) * p_factor(p)


def _alpha_gap_factor(alpha) -> float:
    """|2^alpha - 2|^{-|sgn(alpha-1)|}: exactly 1 at alpha = 1 (exponent 0)."""
    if alpha == 1:
        return 1.0
    return 1.0 / abs(2.0**alpha - 2.0)


def _alpha_case(alpha, above, at_one, below) -> float:
    if alpha > 1:
        return above
    if alpha == 1:
        return at_one
    return below


def front_constant_interior(alpha, p, d: int) -> float:
    """Binomial-form front constant of the interior hat recovery bound."""
    g1 = float(two_pow_alpha_minus_1(alpha))
    case = _alpha_case(alpha, 1.0, float(d), g1 ** (-d))
    return _alpha_gap_factor(alpha) * (2.0 * p_factor(p)) ** (-d) * case


def front_constant_support_bounded(alpha, p, nu: int) -> float:
    """Binomial-form front constant of the support-bounded hat recovery bound."""
    g1 = float(two_pow_alpha_minus_1(alpha))
    case = _alpha_case(alpha, 1.0, float(nu), g1 ** (-nu))
    return _alpha_gap_factor(alpha) * (1.0 + 1.0 / (2.0 * p_factor(p))) ** nu * case


def front_constant_interior_cubature(alpha, d: int) -> float:
    g1 = float(two_pow_alpha_minus_1(alpha))
    case = _alpha_case(alpha, 1.0, float(d), g1 ** (-d))
    return _alpha_gap_factor(alpha) * case


def front_constant_support_bounded_cubature(alpha, nu: int) -> float:
    g1 = float(two_pow_alpha_minus_1(alpha))
    case = _alpha_case(
        alpha, 1.25**nu, nu * 1.25**nu, (1.0 + 1.0 / (4.0 * g1)) ** nu
    )
    return _alpha_gap_factor(alpha) * case


def front_constant_qi(alpha, nu: int, a: float, b: float) -> float:
    """Binomial-form front constant of the spline-scheme recovery bound."""
    g1 = float(two_pow_alpha_minus_1(alpha))
    case = _alpha_case(alpha, (a + b) ** nu, nu * (a + b) ** nu, (a / g1 + b) ** nu)
    return _alpha_gap_factor(alpha) * case


@dataclass(frozen=True)
class BoundReport:
    """One evaluated bound: which inequality, which side, which form."""

    target: str
    side: str  # "upper" | "lower"
    form: str  # "refined" | "binomial" | "m_power"
    value: float
    params: dict = field(default_factory=dict)


_TARGETS = (
    "recovery_interior",
    "recovery_support_bounded",
    "cubature_interior",
    "cubature_support_bounded",
    "qi_recovery",
    "qi_cubature",
)


def _require(condition: bool, message: str):
    if not condition:
        raise BoundHypothesisError(message)


def _m_power(m: int, exponent: int) -> float:
    return 1.0 if exponent == 0 else float(m) ** exponent


def theorem_bound(target: str, side: str, *, alpha, m: int, p=None, d: int | None = None,
                  nu: int | None = None, a: float | None = None, b: float | None = None,
                  form: str = "refined") -> BoundReport:
    """Evaluate one of the explicit recovery/cubature bounds.

    Hypothesis violations raise BoundHypothesisError naming the failed
    condition rather than silently computing outside the stated range.
    """
    if target not in _TARGETS:
        raise ValueError(f"unknown target {target!r}")
    if side not in ("upper", "lower"):
        raise ValueError("side must be 'upper' or 'lower'")
    if form not in ("refined", "binomial", "m_power"):
        raise ValueError("form must be refined | binomial | m_power")
    _require(alpha > 0, "alpha must be positive")
    t = decay_ratio(alpha)
    tm = float(t) ** m
    params = {"alpha": alpha, "p": p, "d": d, "nu": nu, "m": m, "a": a, "b": b}

    def report(value: float) -> BoundReport:
        return BoundReport(target, side, form, float(value), params)

    if target in ("recovery_interior", "cubature_interior"):
        _require(d is not None and d >= 1, "d required")
        _require(alpha <= 2, f"{target} stated for alpha <= 2")
        _require(m >= d, f"needs m >= d (m={m}, d={d})")
        if target == "cubature_interior":
            p = 1  # cubature bounds are the p = 1 specialization
        if side == "upper":
            _require(p is not None, "p required")
            if form == "refined":
                return report((2.0 * p_factor(p)) ** (-d) * float(beta(alpha, d, m)) * tm)
            if form == "m_power":
                g1 = float(two_pow_alpha_minus_1(alpha))
                return report(exp(g1) * bound_b_faber(alpha, p) ** (-d) * tm * _m_power(m, d - 1))
            _require(m >= 2 * (d - 1), f"binomial form needs m >= 2(d-1) = {2*(d-1)}")
            if target == "cubature_interior":
                front = front_constant_interior_cubature(alpha, d) * 0.25**d
            else:
                front = front_constant_interior(alpha, p, d)
            return report(front * tm * comb(m, d - 1))
        # lower bounds are stated for 1 <= p <= inf
        _require(p is None or p >= 1, "lower bounds need p >= 1")
        g1 = float(two_pow_alpha_minus_1(alpha))
        if form == "refined":
            return report(2.0 ** (-7 * d) * float(beta(alpha, d, m)) * tm)
        if form == "binomial":
            return report(g1 ** (-1) * 2.0 ** (-7 * d) * tm * comb(m, d - 1))
        # (d-1)^{-(d-1)} with the 0^0 = 1 convention
        shrink = 1.0 if d == 1 else float(d - 1) ** (-(d - 1))
        return report(g1 ** (-1) * 2.0 ** (-7 * d) * shrink * tm * _m_power(m, d - 1))

    if target in ("recovery_support_bounded", "cubature_support_bounded"):
        _require(nu is not None and nu >= 1, "nu required")
        _require(alpha <= 2, f"{target} stated for alpha <= 2")
        _require(m >= nu, f"needs m >= nu (m={m}, nu={nu})")
        if target == "cubature_support_bounded":
            p = 1
        if side == "upper":
            _require(p is not None, "p required")
            if form == "refined":
                return report(float(gamma(alpha, p, nu, m)) * tm)
            if form == "m_power":
                g1 = float(two_pow_alpha_minus_1(alpha))
                return report(
                    exp(g1) * (1.0 + 1.0 / bound_b_faber(alpha, p)) ** nu * tm * _m_power(m, nu - 1)
                )
            _require(m >= 2 * (nu - 1), f"binomial form needs m >= 2(nu-1) = {2*(nu-1)}")
            if target == "cubature_support_bounded":
                front = front_constant_support_bounded_cubature(alpha, nu)
            else:
                front = front_constant_support_bounded(alpha, p, nu)
            return report(front * tm * comb(m, nu - 1))
        _require(p is None or p >= 1, "lower bounds need p >= 1")
        g1 = float(two_pow_alpha_minus_1(alpha))
        if form == "refined":
            return report(float(gamma_prime(alpha, nu, m)) * tm)
        if form == "binomial":
            return report(
                (2.0**7 * g1) ** (-1) * (2.0**alpha - 127.0 / 128.0) ** (nu - 1) * tm * comb(m, nu - 1)
            )
        raise BoundHypothesisError("no m_power form for the support-bounded lower bound")

    # spline-scheme targets: only upper bounds exist
    _require(side == "upper", f"{target} has no stated lower bound")
    _require(nu is not None and nu >= 1, "nu required")
    _require(a is not None and b is not None, "scheme constants a, b required")
    _require(m >= nu, f"needs m >= nu (m={m}, nu={nu})")
    if form == "refined":
        return report(delta(alpha, nu, a, b, m) * tm)
    if form == "m_power":
        g1 = float(two_pow_alpha_minus_1(alpha))
        return report(exp(g1) * (a / g1 + b) ** nu * tm * _m_power(m, nu - 1))
    _require(m >= 2 * (nu - 1), f"binomial form needs m >= 2(nu-1) = {2*(nu-1)}")
    return report(front_constant_qi(alpha, nu, a, b) * tm * comb(m, nu - 1))
