"""Dyadic cube lattice arithmetic.

Coordinates are dyadic rationals held as :class:`fractions.Fraction`, so cube
boundaries are exact and half-open membership tests never misclassify points.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

__all__ = [
    "DyadicCube",
    "Region",
    "containing_cube",
    "triple",
    "cubes_of_generation",
    "is_dyadic",
]


def is_dyadic(value: Fraction) -> bool:
    """True when ``value`` has a power-of-two denominator."""
    d = Fraction(value).denominator
    return d & (d - 1) == 0


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite coordinate {x!r}")
        return Fraction(x)  # floats are dyadic, conversion is exact
    return Fraction(x)


@dataclass(frozen=True)
class Region:
    """Axis-aligned box ``prod [lo_i, hi_i)`` with dyadic endpoints."""

    lo: tuple[Fraction, ...]
    hi: tuple[Fraction, ...]

    def __post_init__(self):
        lo = tuple(_as_fraction(v) for v in self.lo)
        hi = tuple(_as_fraction(v) for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise ValueError("lo and hi must be nonempty and of equal length")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ValueError(f"empty region {lo} .. {hi}")
        if not all(is_dyadic(v) for v in lo + hi):
            raise ValueError("region endpoints must be dyadic rationals")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def interval(cls, a, b) -> "Region":
        return cls((a,), (b,))

    @classmethod
    def cube(cls, a, b, n: int = 1) -> "Region":
        return cls((a,) * n, (b,) * n)

    @property
    def n(self) -> int:
        return len(self.lo)

    @property
    def volume(self) -> Fraction:
        return math.prod((b - a for a, b in zip(self.lo, self.hi)), start=Fraction(1))

    def contains_point(self, x: Sequence) -> bool:
        return all(a <= _as_fraction(v) < b for a, b, v in zip(self.lo, self.hi, x))

    def contains_region(self, other: "Region") -> bool:
        return all(
            a <= c and d <= b
            for a, b, c, d in zip(self.lo, self.hi, other.lo, other.hi)
        )

    def intersects(self, other: "Region") -> bool:
        return all(
            max(a, c) < min(b, d)
            for a, b, c, d in zip(self.lo, self.hi, other.lo, other.hi)
        )

    def aligned_to(self, gen: int) -> bool:
        """Endpoints are integer multiples of ``2**-gen``."""
        scale = Fraction(2) ** gen
        return all((v * scale).denominator == 1 for v in self.lo + self.hi)


@dataclass(frozen=True, order=True)
class DyadicCube:
    """The half-open cube ``Q_{jk} = prod [2^-j k_i, 2^-j (k_i + 1))``."""

    j: int
    k: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(v) for v in self.k))
        if len(self.k) not in (1, 2):
            raise ValueError("only dimensions 1 and 2 are supported")

    @property
    def n(self) -> int:
        return len(self.k)

    @property
    def side(self) -> Fraction:
        return Fraction(2) ** (-self.j)

    @property
    def volume(self) -> Fraction:
        return self.side**self.n

    @property
    def region(self) -> Region:
        s = self.side
        return Region(tuple(s * ki for ki in self.k), tuple(s * (ki + 1) for ki in self.k))

    def contains_point(self, x: Sequence) -> bool:
        return self.region.contains_point(x)

    def parent(self) -> "DyadicCube":
        return DyadicCube(self.j - 1, tuple(ki // 2 for ki in self.k))

    def ancestor(self, generations: int) -> "DyadicCube":
        return DyadicCube(self.j - generations, tuple(ki >> generations for ki in self.k))

    def child(self, which: Sequence[int]) -> "DyadicCube":
        if len(which) != self.n or any(w not in (0, 1) for w in which):
            raise ValueError("child selector must be a 0/1 vector of length n")
        return DyadicCube(self.j + 1, tuple(2 * ki + w for ki, w in zip(self.k, which)))

    def children(self) -> list["DyadicCube"]:
        return [self.child(w) for w in itertools.product((0, 1), repeat=self.n)]

    def contains_cube(self, other: "DyadicCube") -> bool:
        if other.j < self.j:
            return False
        return other.ancestor(other.j - self.j) == self


def containing_cube(x, j: int) -> DyadicCube:
    """The unique cube of generation ``j`` containing the point ``x``."""
    if isinstance(x, (int, float, Fraction)):
        x = (x,)
    scale = Fraction(2) ** j
    return DyadicCube(j, tuple(math.floor(_as_fraction(v) * scale) for v in x))


def triple(q: DyadicCube) -> Region:
    """The concentric dilate ``3Q``."""
    s = q.side
    return Region(tuple(s * (ki - 1) for ki in q.k), tuple(s * (ki + 2) for ki in q.k))


def cubes_of_generation(j: int, domain: Region) -> list[DyadicCube]:
    """Cubes of generation ``j`` meeting ``domain``, in lexicographic index order."""
    return list(_iter_generation(j, domain))


def _iter_generation(j: int, domain: Region) -> Iterator[DyadicCube]:
    scale = Fraction(2) ** j
    ranges = []
    for a, b in zip(domain.lo, domain.hi):
        first = math.floor(a * scale)
        last = math.ceil(b * scale)  # exclusive: [a, b) is half-open
        ranges.append(range(first, last))
    for k in itertools.product(*ranges):
        yield DyadicCube(j, k)
