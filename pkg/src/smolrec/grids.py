"""Smolyak-grid index sets, dyadic points, and cardinality formulas.

Three grid flavors over the d-torus, all unions of dyadic lattices
2^{-k} s over level multi-indices k with |k|_1 = m:

* full:            k with every k_j >= 1, shifts s_j in {0, ..., 2^{k_j}-1}
* interior:        k with every k_j >= 1, shifts s_j in {1, ..., 2^{k_j}-1}
* support_bounded: k >= 0 with at most nu nonzero entries, shifts from 0

Points are exact dyadic rationals.  Distinct (k, s) pairs can produce the
same coordinates; enumeration merges them and keeps every origin, while the
closed cardinality formulas count (k, s) representations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterator, Literal, Optional

MultiIndex = tuple[int, ...]


def index_sum(k: MultiIndex) -> int:
    return sum(k)

def index_support(k: MultiIndex) -> tuple[int, ...]:
    return tuple(j for j, kj in enumerate(k) if kj)


@dataclass(frozen=True)
class GridVariant:
    kind: Literal["full", "interior", "support_bounded"]
    nu: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("full", "interior", "support_bounded"):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        if self.kind == "support_bounded":
            if self.nu is None or self.nu < 1:
                raise ValueError("support_bounded needs nu >= 1")
        elif self.nu is not None:
            raise ValueError(f"{self.kind} grid takes no nu")

    @classmethod
    def full(cls) -> "GridVariant":
        return cls("full")

    @classmethod
    def interior(cls) -> "GridVariant":
        return cls("interior")

    @classmethod
    def support_bounded(cls, nu: int) -> "GridVariant":
        return cls("support_bounded", nu)

    def shift_start(self) -> int:
        return 1 if self.kind == "interior" else 0


@dataclass(frozen=True)
class DyadicPoint:
    """A grid point with exact coordinates and all generating (k, s) pairs."""

    coords: tuple[Fraction, ...]
    origins: tuple[tuple[MultiIndex, MultiIndex], ...]

    @property
    def d(self) -> int:
        return len(self.coords)

    def as_floats(self) -> tuple[float, ...]:
        return tuple(float(c) for c in self.coords)


def compositions(total: int, parts: int) -> Iterator[MultiIndex]:
    """All tuples of `parts` positive integers summing to `total`."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def level_index_sets(d: int, m: int, variant: GridVariant) -> list[MultiIndex]:
    """Level multi-indices admitted at composition level |k|_1 = m."""
    if d < 1 or m < 0:
        raise ValueError("need d >= 1 and m >= 0")
    if variant.kind in ("full", "interior"):
        return list(compositions(m, d))
    if m == 0:
        return [(0,) * d]
    out = []
    for size in range(1, min(variant.nu, d, m) + 1):
        for support in combinations(range(d), size):
            for comp in compositions(m, size):
                k = [0] * d
                for pos, kj in zip(support, comp):
                    k[pos] = kj
                out.append(tuple(k))
    return out


def cumulative_level_sets(d: int, m: int, variant: GridVariant) -> list[MultiIndex]:
    """Union of level_index_sets over all levels <= m (what operators consume)."""
    out: list[MultiIndex] = []
    for mm in range(m + 1):
        out.extend(level_index_sets(d, mm, variant))
    return out


def _shift_ranges(k: MultiIndex, variant: GridVariant) -> list[range]:
    start = variant.shift_start()
    return [range(start, 1 << kj) for kj in k]


def iter_representations(d: int, m: int, variant: GridVariant) -> Iterator[tuple[MultiIndex, MultiIndex]]:
    """Every admitted (k, s) pair at level m, without merging coordinates."""
    from itertools import product

    for k in level_index_sets(d, m, variant):
        ranges = _shift_ranges(k, variant)
        if any(len(r) == 0 for r in ranges):
            continue
        for s in product(*ranges):
            yield k, s


def point_coords(k: MultiIndex, s: MultiIndex) -> tuple[Fraction, ...]:
    return tuple(Fraction(sj, 1 << kj) for kj, sj in zip(k, s))


def enumerate_grid(d: int, m: int, variant: GridVariant) -> list[DyadicPoint]:
    """Distinct grid points, each carrying all its (k, s) origins.

    Sorted lexicographically by coordinates.  The number of representations
    sum(len(p.origins)) equals the closed cardinality formula; the number of
    distinct points can be smaller.
    """
    merged: dict[tuple[Fraction, ...], list] = {}
    for k, s in iter_representations(d, m, variant):
        merged.setdefault(point_coords(k, s), []).append((k, s))
    return [
        DyadicPoint(coords, tuple(origins))
        for coords, origins in sorted(merged.items())
    ]


def representation_count(points: list[DyadicPoint]) -> int:
    return sum(len(p.origins) for p in points)


def grid_cardinality(d: int, m: int, variant: GridVariant) -> tuple[int, Optional[int]]:
    """(exact, paper_bound): closed summation formula and binomial bound.

    `exact` counts (k, s) representations.  The bound is 2^m C(m-1, d-1)
    for full/interior (defined for m >= d) and 2^m C(d, nu) C(m-1, nu-1)
    for support_bounded (defined for m >= nu); None when the hypothesis
    fails.  exact <= bound holds whenever the bound is defined.
    """
    if variant.kind in ("full", "interior"):
        interior = variant.kind == "interior"
        exact = 0
        for k in compositions(m, d):
            prod = 1
            for kj in k:
                prod *= (1 << kj) - (1 if interior else 0)
            exact += prod
        bound = (1 << m) * comb(m - 1, d - 1) if m >= d else None
        return exact, bound
    nu = variant.nu
    if m == 0:
        exact = 1
    else:
        exact = 0
        for size in range(1, min(nu, d, m) + 1):
            inner = 0
            for comp in compositions(m, size):
                prod = 1
                for kj in comp:
                    prod *= (1 << kj) - 1
                inner += prod
            exact += comb(d, size) * inner
    bound = (1 << m) * comb(d, nu) * comb(m - 1, nu - 1) if m >= nu and m >= 1 else None
    return exact, bound


def cumulative_grid_coords(d: int, m: int, variant: GridVariant) -> set[tuple[Fraction, ...]]:
    """Distinct coordinates of the union of grids at levels <= m."""
    coords: set[tuple[Fraction, ...]] = set()
    for mm in range(m + 1):
        for k, s in iter_representations(d, mm, variant):
            coords.add(point_coords(k, s))
    return coords


def coordinate_label(c: Fraction) -> str:
    """Exact dyadic label "num/2^k" used in CSV output."""
    den = c.denominator
    k = den.bit_length() - 1
    return f"{c.numerator}/2^{k}"
