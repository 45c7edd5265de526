"""Hierarchical hat-function analysis and sparse-grid recovery operators.

The coefficient of the hat phi_{k,s} is the hierarchical surplus: minus half
the second difference of f at step 2^{-k_j} based at the hat's left support
endpoint, applied per active coordinate (levels k_j = 0 just evaluate).
Truncating the resulting series over a downward-closed set of level
multi-indices gives the recovery operators; their samples live on dyadic
sparse grids.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Callable, Iterator, Optional

import numpy as np

from .bspline import faber_hat, faber_hat_integral, hat_shift_count
from .grids import GridVariant, MultiIndex, cumulative_level_sets, index_support
from .laurent import wrap_unit

Point = tuple[Fraction, ...]
Stencil = list[tuple[Point, Fraction]]

_HALF = Fraction(1, 2)


def _axis_stencil(k: int, s: int) -> list[tuple[Fraction, Fraction]]:
    """Univariate surplus stencil: ordered (node, weight) pairs, exact."""
    if k == 0:
        return [(Fraction(0), Fraction(1))]
    if not 0 <= s < hat_shift_count(k):
        raise ValueError(f"shift {s} out of range for level {k}")
    step = Fraction(1, 1 << k)
    base = 2 * s * step
    nodes = {}
    for offset, weight in ((0, -_HALF), (1, Fraction(1)), (2, -_HALF)):
        node = wrap_unit(base + offset * step)
        nodes[node] = nodes.get(node, Fraction(0)) + weight
    return [(n, w) for n, w in nodes.items() if w]


def tensor_stencil(k: MultiIndex, s: MultiIndex) -> Stencil:
    """Sampling stencil of the surplus functional at (k, s)."""
    axes = [_axis_stencil(kj, sj) for kj, sj in zip(k, s)]
    out: Stencil = []
    for combo in product(*axes):
        point = tuple(node for node, _ in combo)
        weight = Fraction(1)
        for _, w in combo:
            weight *= w
        out.append((point, weight))
    return out


def surplus_functional(
    f: Callable,
    k: MultiIndex,
    s: MultiIndex,
    *,
    cache: Optional[dict] = None,
    skip_zero_boundary: bool = False,
) -> float:
    """Hierarchical surplus coefficient of the hat at (k, s).

    Samples f only at exact dyadic points; `cache` (keyed by the exact
    coordinate tuple) makes repeated nodes free.  With
    `skip_zero_boundary`, nodes having any zero coordinate contribute 0
    without calling f (valid for the zero-boundary class).
    """
    total = 0.0
    for point, weight in tensor_stencil(k, s):
        if skip_zero_boundary and any(c == 0 for c in point):
            continue
        if cache is not None:
            if point in cache:
                value = cache[point]
            else:
                value = f(point)
                cache[point] = value
        else:
            value = f(point)
        total += weight * value
    return float(total)


def _level_shift_sets(k: MultiIndex) -> Iterator[MultiIndex]:
    return product(*[range(hat_shift_count(kj)) for kj in k])


class FaberExpansion:
    """A finite hat-function expansion sum c_{k,s} prod_j phi_{k_j,s_j}."""

    def __init__(self, d: int, levels: dict[MultiIndex, dict[MultiIndex, float]], meta: dict | None = None):
        self.d = d
        self.levels = levels
        self.meta = dict(meta or {})
        self._arrays: dict[MultiIndex, np.ndarray] = {}

    @property
    def n_terms(self) -> int:
        return sum(len(v) for v in self.levels.values())

    def terms(self) -> Iterator[tuple[MultiIndex, MultiIndex, float]]:
        for k in sorted(self.levels):
            for s in sorted(self.levels[k]):
                yield k, s, self.levels[k][s]

    def level_array(self, k: MultiIndex) -> np.ndarray:
        arr = self._arrays.get(k)
        if arr is None:
            shape = tuple(hat_shift_count(kj) for kj in k)
            arr = np.zeros(shape)
            for s, c in self.levels[k].items():
                arr[s] = c
            self._arrays[k] = arr
        return arr

    def __call__(self, x) -> float:
        """Pointwise value; only one hat per level is nonzero at x."""
        if len(x) != self.d:
            raise ValueError("dimension mismatch")
        t = [wrap_unit(c) for c in x]
        total = 0.0
        for k, coeffs in self.levels.items():
            s = []
            phi = 1.0
            for kj, tj in zip(k, t):
                if kj == 0:
                    s.append(0)
                    continue
                sj = min(int((tj * (1 << kj)) // 2), hat_shift_count(kj) - 1)
                s.append(sj)
                phi *= float(faber_hat(kj, sj, tj))
                if phi == 0.0:
                    break
            else:
                c = coeffs.get(tuple(s))
                if c:
                    total += c * phi
        return total

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        """Vectorized evaluation on an (n, d) float array."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        t = np.mod(X, 1.0)
        total = np.zeros(len(t))
        for k in self.levels:
            arr = self.level_array(k)
            idx = []
            weight = np.ones(len(t))
            for j, kj in enumerate(k):
                if kj == 0:
                    idx.append(np.zeros(len(t), dtype=np.intp))
                    continue
                scaled = np.ldexp(t[:, j], kj)
                sj = np.clip((scaled * 0.5).astype(np.intp), 0, hat_shift_count(kj) - 1)
                idx.append(sj)
                weight *= np.clip(1.0 - np.abs(scaled - 2.0 * sj - 1.0), 0.0, None)
            total += weight * arr[tuple(idx)]
        return total

    def sample_points(self) -> set[Point]:
        """Exact coordinates of every sample the expansion's stencils read."""
        skip = self.meta.get("variant") == "interior"
        points: set[Point] = set()
        for k, coeffs in self.levels.items():
            for s in coeffs:
                for point, _ in tensor_stencil(k, s):
                    if skip and any(c == 0 for c in point):
                        continue
                    points.add(point)
        return points


def level_component(f: Callable, k: MultiIndex, *, cache: Optional[dict] = None,
                    skip_zero_boundary: bool = False) -> FaberExpansion:
    """All surplus coefficients at one level multi-index k."""
    d = len(k)
    coeffs = {}
    for s in _level_shift_sets(k):
        coeffs[s] = surplus_functional(f, k, s, cache=cache,
                                       skip_zero_boundary=skip_zero_boundary)
    return FaberExpansion(d, {k: coeffs}, {"kind": "level", "k": k})


def _recover(f, d, m, variant: GridVariant, nu=None) -> FaberExpansion:
    cache: dict = {}
    skip = variant.kind == "interior"
    levels: dict[MultiIndex, dict[MultiIndex, float]] = {}
    for k in cumulative_level_sets(d, m, variant):
        coeffs = {}
        for s in _level_shift_sets(k):
            coeffs[s] = surplus_functional(f, k, s, cache=cache, skip_zero_boundary=skip)
        levels[k] = coeffs
    meta = {"variant": variant.kind, "d": d, "m": m, "nu": nu,
            "sample_count": len(cache)}
    return FaberExpansion(d, levels, meta)


def recover_interior(f: Callable, d: int, m: int) -> FaberExpansion:
    """Truncation over positive levels |k|_1 <= m, for zero-boundary functions.

    Empty (the zero function) when m < d.  Samples lie in the interior grid:
    nodes with a zero coordinate are never requested.
    """
    return _recover(f, d, m, GridVariant.interior())


def recover_support_bounded(f: Callable, d: int, m: int, nu: int) -> FaberExpansion:
    """Truncation over levels with |supp(k)| <= nu and |k|_1 <= m."""
    if not 1 <= nu <= d:
        raise ValueError("need 1 <= nu <= d")
    return _recover(f, d, m, GridVariant.support_bounded(nu), nu)


def level_lp_norm(expansion: FaberExpansion, k: MultiIndex, p) -> float:
    """L_p norm of the level-k part, closed form.

    Hats at one level have disjoint interiors, so the norm reduces to the
    coefficients: max |c| for p = inf, else
    (sum |c|^p * prod_{k_j>=1} 2^{1-k_j}/(p+1))^{1/p}.
    """
    coeffs = expansion.levels.get(k, {})
    if not coeffs:
        return 0.0
    values = np.array([abs(c) for c in coeffs.values()])
    if p == np.inf or p == float("inf"):
        return float(values.max())
    cell = 1.0
    for kj in k:
        if kj >= 1:
            cell *= 2.0 ** (1 - kj) / (p + 1)
    return float((np.sum(values**p) * cell) ** (1.0 / p))


def surplus_decay_bound(alpha: float, p, k: MultiIndex, seminorm: float) -> float:
    """Level-norm bound 2^{-|u|} (p+1)^{-|u|/p} 2^{-alpha |k|_1} * seminorm."""
    u = len(index_support(k))
    if p == np.inf or p == float("inf"):
        pf = 1.0
    else:
        pf = (p + 1.0) ** (1.0 / p)
    return 2.0 ** (-u) * pf ** (-u) * 2.0 ** (-alpha * sum(k)) * seminorm


def sample_weight_table(d: int, m: int, variant: GridVariant) -> dict[Point, dict]:
    """Per-sample-point view of the recovery operator.

    Maps each requested sample point to {(k, s): stencil weight}; summing
    weight * (hat integral) per point yields the induced cubature weights,
    and the per-point hat combination is the point's reconstruction
    function.
    """
    skip = variant.kind == "interior"
    table: dict[Point, dict] = {}
    for k in cumulative_level_sets(d, m, variant):
        for s in _level_shift_sets(k):
            for point, weight in tensor_stencil(k, s):
                if skip and any(c == 0 for c in point):
                    continue
                table.setdefault(point, {})
                key = (k, s)
                table[point][key] = table[point].get(key, Fraction(0)) + weight
    return table


def hat_product_integral(k: MultiIndex) -> Fraction:
    out = Fraction(1)
    for kj in k:
        out *= faber_hat_integral(kj)
    return out


# ---- error measurement ------------------------------------------------


def evaluate_on(func, X: np.ndarray) -> np.ndarray:
    """Evaluate a scalar callable or vectorized object on an (n, d) array."""
    many = getattr(func, "evaluate_many", None)
    if many is not None:
        return np.asarray(many(X), dtype=float)
    return np.array([float(func(tuple(row))) for row in X])


def midpoint_lattice(d: int, level: int, max_points: int = 1 << 21) -> np.ndarray:
    """Strided tensor lattice of odd dyadic points (2i+1) 2^{-level-1}.

    These points avoid every dyadic node of level <= level, which is where
    interpolation residuals peak.
    """
    n_axis = 1 << level
    per_axis = min(n_axis, max(2, int(round(max_points ** (1.0 / d)))))
    idx = np.unique(np.round(np.linspace(0, n_axis - 1, per_axis)).astype(np.int64))
    coords = (2.0 * idx + 1.0) / float(1 << (level + 1))
    grids = np.meshgrid(*([coords] * d), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def lp_error(f, g, d: int, p, *, grid_level: int = 9, max_points: int = 1 << 21,
             mc_points: int = 0, seed: int = 0) -> float:
    """Estimate ||f - g||_p on the torus by deterministic sampling.

    Uses the strided odd-dyadic midpoint lattice at `grid_level` (optionally
    augmented with uniform Monte Carlo points); p = inf takes the max over
    the sample set, finite p the midpoint-rule quasi-norm.
    """
    if p != np.inf and p != float("inf") and p <= 0:
        raise ValueError("p must be positive")
    X = midpoint_lattice(d, grid_level, max_points)
    if mc_points:
        rng = np.random.default_rng(seed)
        X = np.vstack([X, rng.random((mc_points, d))])
    diff = np.abs(evaluate_on(f, X) - evaluate_on(g, X))
    if p == np.inf or p == float("inf"):
        return float(diff.max())
    return float(np.mean(diff**p) ** (1.0 / p))
