"""Exact Laurent-polynomial arithmetic over the rationals.

Coefficients are `fractions.Fraction` throughout; every operation returns
canonical form (zero coefficients dropped), so equality is structural.
These polynomials act as symbols of periodic shift operators: the monomial
z**e stands for translation by e*h, see :func:`apply_shift_operator`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Union

Rational = Union[int, Fraction]


def _coerce(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"coefficient must be rational, got {type(value).__name__}")


class LaurentPoly:
    """A univariate Laurent polynomial sum_e c_e * z**e with rational c_e."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, Rational] | Iterable[tuple[int, Rational]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, Fraction] = {}
        for e, c in items:
            c = _coerce(c)
            if c:
                e = int(e)
                acc[e] = acc.get(e, Fraction(0)) + c
        self._terms = {e: c for e, c in acc.items() if c}

    # ---- constructors -------------------------------------------------

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls()

    @classmethod
    def one(cls) -> "LaurentPoly":
        return cls({0: 1})

    @classmethod
    def monomial(cls, exponent: int, coefficient: Rational = 1) -> "LaurentPoly":
        return cls({exponent: coefficient})

    # ---- inspection ---------------------------------------------------

    @property
    def terms(self) -> dict[int, Fraction]:
        """Exponent -> coefficient mapping (a copy; canonical, no zeros)."""
        return dict(self._terms)

    def coefficient(self, exponent: int) -> Fraction:
        return self._terms.get(exponent, Fraction(0))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    @property
    def degree(self) -> int:
        """Largest exponent; raises on the zero polynomial."""
        if not self._terms:
            raise ValueError("zero polynomial has no degree")
        return max(self._terms)

    @property
    def valuation(self) -> int:
        """Smallest exponent; raises on the zero polynomial."""
        if not self._terms:
            raise ValueError("zero polynomial has no valuation")
        return min(self._terms)

    def is_symmetric(self) -> bool:
        """True if c_e = c_{2c-e} around the center c = (valuation+degree)/2.

        The center may be a half-integer; symmetry is checked on doubled
        exponents so no rounding is involved.
        """
        if not self._terms:
            return True
        twice_center = self.degree + self.valuation
        return all(
            c == self._terms.get(twice_center - e, Fraction(0))
            for e, c in self._terms.items()
        )

    # ---- algebra ------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == LaurentPoly({0: other})
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self._terms.items()})

    def __add__(self, other) -> "LaurentPoly":
        other = self._as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return LaurentPoly(out)

    __radd__ = __add__

    def __sub__(self, other) -> "LaurentPoly":
        other = self._as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "LaurentPoly":
        return self._as_poly(other) - self

    def __mul__(self, other) -> "LaurentPoly":
        other = self._as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict[int, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = e1 + e2
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            raise ValueError("negative polynomial powers are not defined")
        out = LaurentPoly.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    @staticmethod
    def _as_poly(value):
        if isinstance(value, LaurentPoly):
            return value
        if isinstance(value, (int, Fraction)):
            return LaurentPoly({0: value})
        return NotImplemented

    def substitute_square(self) -> "LaurentPoly":
        """Return p(z**2): every exponent doubled."""
        return LaurentPoly({2 * e: c for e, c in self._terms.items()})

    def divide_exact(self, divisor: "LaurentPoly") -> tuple["LaurentPoly", "LaurentPoly"]:
        """Long division p = divisor*quotient + remainder, exact rationals.

        Both operands are normalized by their lowest monomial first (Laurent
        division reduces to ordinary polynomial division up to a unit); the
        remainder, after the same normalization, has ordinary degree strictly
        below the divisor's.
        """
        if not divisor:
            raise ZeroDivisionError("division by zero polynomial")
        if not self:
            return LaurentPoly.zero(), LaurentPoly.zero()
        vp, vd = self.valuation, divisor.valuation
        num = {e - vp: c for e, c in self._terms.items()}
        den = {e - vd: c for e, c in divisor._terms.items()}
        deg_den = max(den)
        lead = den[deg_den]
        quot: dict[int, Fraction] = {}
        rem = dict(num)
        while rem:
            deg_rem = max(rem)
            if deg_rem < deg_den:
                break
            shift = deg_rem - deg_den
            factor = rem[deg_rem] / lead
            quot[shift] = quot.get(shift, Fraction(0)) + factor
            for e, c in den.items():
                e2 = e + shift
                rem[e2] = rem.get(e2, Fraction(0)) - factor * c
            rem = {e: c for e, c in rem.items() if c}
        quotient = LaurentPoly({e + vp - vd: c for e, c in quot.items()})
        remainder = LaurentPoly({e + vp: c for e, c in rem.items()})
        return quotient, remainder

    def divides(self, divisor: "LaurentPoly") -> bool:
        return not self.divide_exact(divisor)[1]

    def l1_norm(self) -> Fraction:
        """Sum of absolute coefficient values, exact."""
        return sum((abs(c) for c in self._terms.values()), Fraction(0))

    def __call__(self, x):
        """Evaluate sum c_e x**e.

        Exact for Fraction/int arguments, floating point otherwise.  A zero
        argument is rejected when negative exponents are present.
        """
        if not self._terms:
            return 0 * x if isinstance(x, (int, Fraction)) else 0.0
        if x == 0 and self.valuation < 0:
            raise ZeroDivisionError("evaluation at 0 with negative exponents")
        total = None
        for e, c in self._terms.items():
            term = c * x**e
            total = term if total is None else total + term
        return total

    # ---- serialization ------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "terms": [[e, f"{c.numerator}/{c.denominator}"] for e, c in sorted(self._terms.items())]
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "LaurentPoly":
        return cls({int(e): Fraction(c) for e, c in data["terms"]})

    def __repr__(self) -> str:
        if not self._terms:
            return "LaurentPoly(0)"
        parts = []
        for e, c in sorted(self._terms.items()):
            parts.append(f"{c}*z^{e}" if e else f"{c}")
        return "LaurentPoly(" + " + ".join(parts) + ")"


def difference_symbol(order: int) -> LaurentPoly:
    """(z - 1)**order, the symbol of the forward difference of that order."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    return LaurentPoly({1: 1, 0: -1}) ** order


def wrap_unit(x):
    """Reduce into [0, 1), exactly for Fraction/int arguments."""
    return x % 1


def apply_shift_operator(poly: LaurentPoly, h, f: Callable, x, *, skip: Callable | None = None):
    """Apply sum_e c_e T_{e*h} to f at x, i.e. sum_e c_e f(x + e*h).

    Arguments to f are reduced modulo 1 into [0, 1); with Fraction h and x
    the reduction is exact.  If `skip` is given, nodes with skip(node) true
    contribute zero without calling f (used for zero-boundary classes).
    """
    total = None
    for e, c in poly._terms.items():
        node = wrap_unit(x + e * h)
        if skip is not None and skip(node):
            continue
        term = c * f(node)
        total = term if total is None else total + term
    return 0.0 if total is None else total
