"""Grid-vanishing witness functions certifying recovery lower bounds.

The building block is a quartic-spline bump occupying one dyadic interval
and vanishing, with its first derivative, at both endpoints.  Summing the
bump tilings over all level multi-indices between m and n with geometric
level weights yields a nonnegative function that is exactly zero on every
point of the level-m sparse grid, yet has an explicitly computable L1 mass.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable, Optional

import numpy as np

from .bounds import beta, decay_ratio, gamma_prime, tail_series
from .bspline import cardinal_bspline, cardinal_bspline_many
from .laurent import wrap_unit

_EXACT = (int, Fraction)


def bump(k: int, s: int, x):
    """Bump at level k, slot s: periodization of M_4(2^{k+2} x - 4s).

    Supported exactly on [s 2^{-k}, (s+1) 2^{-k}]; exact for Fraction x.
    """
    if not 0 <= s < (1 << k):
        raise ValueError(f"slot {s} out of range at level {k}")
    t = wrap_unit(x)
    y = (1 << (k + 2)) * t - 4 * s
    return cardinal_bspline(4, y) + cardinal_bspline(4, y + (1 << (k + 2)))


def bump_integral(k: int) -> Fraction:
    """Integral of one bump over the period: 2^{-k-2}."""
    return Fraction(1, 1 << (k + 2))


def bump_tiling(k: int, x):
    """Sum of all 2^k level-k bumps; equals M_4(4 frac(2^k x))."""
    t = wrap_unit(x)
    frac = wrap_unit((1 << k) * t)
    return cardinal_bspline(4, 4 * frac)


def _level_profile_exact(x, n: int) -> list:
    """[None, g_1(x), ..., g_n(x)] for one coordinate, exact for Fraction x."""
    return [None] + [bump_tiling(k, x) for k in range(1, n + 1)]


def _sparse_convolve(profiles: list[dict[int, object]], n: int) -> dict[int, object]:
    """Convolve per-coordinate {level: value} dicts, truncated at level sum n."""
    acc = {0: Fraction(1)}
    for profile in profiles:
        nxt: dict[int, object] = {}
        for l1, v1 in acc.items():
            for l2, v2 in profile.items():
                l = l1 + l2
                if l > n:
                    continue
                prod = v1 * v2
                if l in nxt:
                    nxt[l] = nxt[l] + prod
                else:
                    nxt[l] = prod
        acc = nxt
    acc.pop(0, None)
    return acc


@dataclass(frozen=True)
class WitnessConfig:
    d: int
    m: int
    alpha: float
    n: Optional[int] = None          # defaults to m + 40
    nu: Optional[int] = None         # None: interior flavor; else <= nu active

    def __post_init__(self):
        if self.d < 1 or self.m < 1:
            raise ValueError("need d >= 1 and m >= 1")
        if not 0 < self.alpha <= 2:
            raise ValueError("witness construction certified for 0 < alpha <= 2")
        if self.n is not None and self.n < self.m:
            raise ValueError("need n >= m")
        if self.nu is not None and not 1 <= self.nu <= self.d:
            raise ValueError("need 1 <= nu <= d")

    @property
    def top_level(self) -> int:
        return self.n if self.n is not None else self.m + 40


class FoolingFunction:
    """Evaluator for the grid-vanishing witness.

    Interior flavor (nu None): levels run over all-positive multi-indices,
    the function vanishes on the interior level-m grid and on the boundary.
    Support-bounded flavor: sum over all nonempty subsets u of the first nu
    coordinates of the corresponding |u|-variate witness; vanishes on the
    support-bounded level-m grid.
    """

    def __init__(self, config: WitnessConfig):
        self.config = config
        d, nu = config.d, config.nu
        if nu is None:
            self._subsets = [tuple(range(d))]
            self._interior = True
        else:
            self._subsets = [
                u for size in range(1, nu + 1) for u in combinations(range(nu), size)
            ]
            self._interior = False

    # ---- scalar, exact-friendly ----------------------------------------

    def __call__(self, point):
        cfg = self.config
        if len(point) != cfg.d:
            raise ValueError("dimension mismatch")
        n = cfg.top_level
        exact_point = all(isinstance(c, _EXACT) for c in point)
        profiles = {}
        needed = set()
        for u in self._subsets:
            needed.update(u)
        for j in needed:
            vals = _level_profile_exact(point[j], n)
            profiles[j] = {k: v for k, v in enumerate(vals) if k >= 1 and v}
        total_exact = Fraction(0)
        total_float = 0.0
        any_mass = False
        t = decay_ratio(cfg.alpha)
        exact_weights = isinstance(t, Fraction) and exact_point
        for u in self._subsets:
            coeffs = _sparse_convolve([profiles[j] for j in u], n)
            scale = Fraction(1, 1 << (5 * len(u)))
            for l, c in coeffs.items():
                if l < cfg.m or not c:
                    continue
                any_mass = True
                if exact_weights:
                    total_exact += scale * t**l * c
                else:
                    total_float += float(scale) * float(t) ** l * float(c)
        if not any_mass:
            return Fraction(0) if exact_point else 0.0
        return total_exact if exact_weights else (total_float + float(total_exact))

    # ---- vectorized -----------------------------------------------------

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        cfg = self.config
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        npts = len(X)
        n = cfg.top_level
        needed = sorted({j for u in self._subsets for j in u})
        profiles = {}
        for j in needed:
            t = np.mod(X[:, j], 1.0)
            cols = [np.mod(np.ldexp(t, k), 1.0) for k in range(1, n + 1)]
            profiles[j] = np.stack(
                [cardinal_bspline_many(4, 4.0 * c) for c in cols], axis=1
            )  # (npts, n), column k-1 = level k
        weights = 2.0 ** (-cfg.alpha * np.arange(n + 1))
        total = np.zeros(npts)
        for u in self._subsets:
            acc = np.zeros((npts, n + 1))
            acc[:, 0] = 1.0
            for j in u:
                nxt = np.zeros_like(acc)
                prof = profiles[j]
                for l2 in range(1, n + 1):
                    col = prof[:, l2 - 1]
                    nxt[:, l2:] += acc[:, : n + 1 - l2] * col[:, None]
                acc = nxt
            mass = acc[:, cfg.m :] @ weights[cfg.m :]
            total += 2.0 ** (-5 * len(u)) * mass
        return total

    # ---- exact norms ----------------------------------------------------

    def exact_l1(self):
        """Closed-form L1 mass of the truncated witness (equals its integral).

        Exact rational for integer alpha, float otherwise.
        """
        cfg = self.config
        t = decay_ratio(cfg.alpha)
        if self._interior:
            sizes: Iterable[int] = [cfg.d]
            multiplicity = {cfg.d: 1}
        else:
            sizes = range(1, cfg.nu + 1)
            multiplicity = {s: comb(cfg.nu, s) for s in sizes}
        total = Fraction(0) if isinstance(t, Fraction) else 0.0
        for size in sizes:
            factor = Fraction(multiplicity[size], 1 << (7 * size))
            level_sum = sum(
                t**l * comb(l - 1, size - 1) for l in range(cfg.m, cfg.top_level + 1)
            )
            total = total + factor * level_sum
        return total

    def limit_l1(self):
        """L1 mass with the top level sent to infinity, via the tail series."""
        cfg = self.config
        t = decay_ratio(cfg.alpha)
        if self._interior:
            pairs = [(1, cfg.d)]
        else:
            pairs = [(comb(cfg.nu, s), s) for s in range(1, cfg.nu + 1)]
        total = Fraction(0) if isinstance(t, Fraction) else 0.0
        for mult, size in pairs:
            total = total + Fraction(mult, 1 << (7 * size)) * t**cfg.m * tail_series(
                cfg.m - 1, size - 1, t
            )
        return total

    def tail_l1_bound(self):
        """Upper bound on the mass dropped by truncating at the top level."""
        return self.limit_l1() - self.exact_l1()

    @property
    def true_integral(self):
        return self.exact_l1()


def fooling_function(config: WitnessConfig) -> tuple[FoolingFunction, object]:
    """Evaluator plus its exact L1 norm."""
    fn = FoolingFunction(config)
    return fn, fn.exact_l1()


# ---- membership spot check ----------------------------------------------


@dataclass(frozen=True)
class SpotCheckReport:
    trials: int
    failures: int
    worst_excess: float
    max_ratio: float

    @property
    def passed(self) -> bool:
        return self.failures == 0


def holder_membership_spotcheck(fn, alpha: float, trials: int, d: int,
                                *, seed: int = 0, tol: float = 1e-9,
                                smallest_h_exp: float = 24.0) -> SpotCheckReport:
    """Randomized check of the mixed-difference certificate.

    For random (x, h, u) verifies |Delta^{2,u}_h fn(x)| <= prod_{j in u}
    h_j^alpha + tol.  Steps are drawn log-uniformly down to
    2^{-smallest_h_exp}; the additive tolerance absorbs double-precision
    cancellation at the smallest steps.  Statistical evidence, not a proof.
    """
    rng = np.random.default_rng(seed)
    subsets = [u for size in range(1, d + 1) for u in combinations(range(d), size)]
    per = max(1, trials // len(subsets))
    failures = 0
    worst = -np.inf
    max_ratio = 0.0
    total = 0
    for u in subsets:
        nt = per
        total += nt
        x = rng.random((nt, d))
        h = 2.0 ** (-rng.uniform(0.0, smallest_h_exp, (nt, len(u))))
        value = np.zeros(nt)
        for offsets in np.ndindex(*(3,) * len(u)):
            pts = x.copy()
            w = 1.0
            for pos, j in enumerate(u):
                pts[:, j] = pts[:, j] + offsets[pos] * h[:, pos]
                w *= (1.0, -2.0, 1.0)[offsets[pos]]
            value += w * fn.evaluate_many(pts)
        budget = np.prod(h**alpha, axis=1)
        excess = np.abs(value) - budget
        failures += int(np.sum(excess > tol))
        worst = max(worst, float(excess.max()))
        with np.errstate(divide="ignore", invalid="ignore"):
            max_ratio = max(max_ratio, float(np.nanmax(np.abs(value) / budget)))
    return SpotCheckReport(total, failures, worst, max_ratio)


# ---- lower bound demonstration -------------------------------------------


@dataclass(frozen=True)
class LowerBoundDemo:
    witness_l1_partial: float
    witness_l1_limit: float
    theorem_lower: float
    tail_bound: float
    consistent: bool


def lower_bound_demonstration(config: WitnessConfig, p=1) -> LowerBoundDemo:
    """Relate the witness mass to the reported lower-bound value.

    The witness value is a lower bound for the optimal-recovery error at
    every p >= 1 since ||.||_p >= ||.||_1.  The reported theorem value is
    the limit expression contracted by one application of the tail-series
    sandwich, so theorem <= limit must hold; for the support-bounded flavor
    the proof-form (nonempty-subset) sum is used.
    """
    if p != np.inf and p < 1:
        raise ValueError("demonstration stated for p >= 1")
    fn = FoolingFunction(config)
    partial = float(fn.exact_l1())
    limit = float(fn.limit_l1())
    t = decay_ratio(config.alpha)
    if config.nu is None:
        theorem = float(Fraction(1, 1 << (7 * config.d)) * beta(config.alpha, config.d, config.m) * t**config.m)
    else:
        theorem = float(
            gamma_prime(config.alpha, config.nu, config.m, include_empty=False) * t**config.m
        )
    tail = limit - partial
    consistent = partial <= limit + 1e-15 and theorem <= limit * (1 + 1e-12)
    return LowerBoundDemo(partial, limit, theorem, tail, consistent)
