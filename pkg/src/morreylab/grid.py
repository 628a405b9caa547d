"""Nonnegative piecewise-constant functions on a dyadic grid.

A :class:`GridFunction` lives on the domain ``[-2**E, 2**E)**n`` split into
cells of side ``2**-G``.  Every local norm of such a function is a finite sum,
so Morrey norms and maximal functions below are exact up to rounding.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy import integrate
from scipy.ndimage import maximum_filter1d

from .dyadic import Region

__all__ = [
    "GridError",
    "AlignmentError",
    "DomainError",
    "GridFunction",
    "MorreyParams",
    "indicator",
    "power_profile",
    "constant",
    "dilate",
    "embed",
    "lq_norm_on",
    "morrey_norm_dyadic",
    "morrey_norm_general",
    "hl_maximal",
    "powered_maximal",
    "load_function",
    "save_function",
]

# extra coarse generations scanned beyond the domain cube
WINDOW_SLACK = 2


class GridError(ValueError):
    """Invalid grid data or incompatible lattices."""


class AlignmentError(GridError):
    """A region or function does not align with the requested lattice."""


class DomainError(GridError):
    """Support does not fit the domain."""


@dataclass(frozen=True, eq=False)
class GridFunction:
    n: int
    extent: int
    gen: int
    values: np.ndarray

    def __post_init__(self):
        if self.n not in (1, 2):
            raise GridError(f"dimension must be 1 or 2, got {self.n}")
        if self.extent + self.gen + 1 < 0:
            raise GridError("grid has no cells: need extent + gen + 1 >= 0")
        vals = np.array(self.values, dtype=np.float64)
        shape = (self.cells,) * self.n
        if vals.size != self.cells**self.n:
            raise GridError(f"expected {self.cells ** self.n} values, got {vals.size}")
        vals = vals.reshape(shape)
        if not np.all(np.isfinite(vals)):
            raise GridError("values must be finite")
        if np.any(vals < 0):
            raise GridError("values must be nonnegative")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def cells(self) -> int:
        """Cells per axis."""
        return 2 ** (self.extent + 1 + self.gen)

    @property
    def h(self) -> float:
        return 2.0 ** (-self.gen)

    @property
    def cell_volume(self) -> float:
        return self.h**self.n

    @property
    def origin(self) -> int:
        """Index of the cell whose left edge is 0."""
        return 2 ** (self.extent + self.gen)

    @property
    def domain(self) -> Region:
        r = Fraction(2) ** self.extent
        return Region.cube(-r, r, self.n)

    def centers(self) -> np.ndarray:
        """Cell centers along one axis."""
        return -(2.0**self.extent) + (np.arange(self.cells) + 0.5) * self.h

    def edges(self) -> np.ndarray:
        return -(2.0**self.extent) + np.arange(self.cells + 1) * self.h

    def same_lattice(self, other: "GridFunction") -> bool:
        return (self.n, self.extent, self.gen) == (other.n, other.extent, other.gen)

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.n, self.extent, self.gen, values)

    def scaled(self, c: float) -> "GridFunction":
        return self.with_values(self.values * c)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        _require_same(self, other)
        return self.with_values(self.values + other.values)

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def index_of(self, x) -> tuple[int, ...]:
        """Cell index containing the point ``x``."""
        if np.isscalar(x):
            x = (x,)
        idx = []
        for v in x:
            i = math.floor((Fraction(v) + Fraction(2) ** self.extent) * 2**self.gen)
            if not 0 <= i < self.cells:
                raise DomainError(f"point {v} outside the domain")
            idx.append(i)
        return tuple(idx)

    def value_at(self, x) -> float:
        try:
            return float(self.values[self.index_of(x)])
        except DomainError:
            return 0.0

    def to_dict(self) -> dict:
        return {
            "dim": self.n,
            "extent": self.extent,
            "gen": self.gen,
            "values": self.values.ravel().tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GridFunction":
        try:
            n, extent, gen, values = data["dim"], data["extent"], data["gen"], data["values"]
        except (KeyError, TypeError) as exc:
            raise GridError(f"missing field in function file: {exc}") from None
        vals = np.asarray(values, dtype=np.float64)
        if vals.ndim != 1:
            raise GridError("values must be a flat row-major list")
        return cls(int(n), int(extent), int(gen), vals)


def _require_same(f: GridFunction, g: GridFunction):
    if not f.same_lattice(g):
        raise GridError(
            f"lattice mismatch: (n,E,G)=({f.n},{f.extent},{f.gen}) vs ({g.n},{g.extent},{g.gen})"
        )


@dataclass(frozen=True)
class MorreyParams:
    p: float
    q: float

    def __post_init__(self):
        if not (0 < self.q <= self.p < math.inf):
            raise ValueError(f"need 0 < q <= p < inf, got p={self.p}, q={self.q}")


def load_function(path) -> GridFunction:
    with open(path) as fh:
        return GridFunction.from_dict(json.load(fh))


def save_function(f: GridFunction, path) -> None:
    Path(path).write_text(json.dumps(f.to_dict()) + "\n")


# ---------------------------------------------------------------------------
# constructors


def constant(c: float, gen: int, extent: int, n: int = 1) -> GridFunction:
    cells = 2 ** (extent + 1 + gen)
    return GridFunction(n, extent, gen, np.full((cells,) * n, float(c)))


def indicator(region: Region, gen: int, extent: int) -> GridFunction:
    """Indicator of a grid-aligned region."""
    if not region.aligned_to(gen):
        raise AlignmentError(f"region {region} is not aligned to generation {gen}")
    r = Fraction(2) ** extent
    if not Region.cube(-r, r, region.n).contains_region(region):
        raise DomainError(f"region {region} exceeds the domain [-{r}, {r})")
    cells = 2 ** (extent + 1 + gen)
    vals = np.zeros((cells,) * region.n)
    sl = tuple(
        slice(int((a + r) * 2**gen), int((b + r) * 2**gen))
        for a, b in zip(region.lo, region.hi)
    )
    vals[sl] = 1.0
    return GridFunction(region.n, extent, gen, vals)


def _power_avg_1d(a: np.ndarray, b: np.ndarray, beta: float) -> np.ndarray:
    # average of |x|^-beta over [a, b) with a, b on the same side of 0
    lo = np.minimum(np.abs(a), np.abs(b))
    hi = np.maximum(np.abs(a), np.abs(b))
    e = 1.0 - beta
    return (hi**e - lo**e) / (e * (b - a))


def power_profile(beta: float, gen: int, extent: int, n: int = 1) -> GridFunction:
    """Cell averages of ``|x|**-beta``."""
    if not 0 < beta < n:
        raise ValueError(f"power profile needs 0 < beta < n for integrability, got {beta}")
    cells = 2 ** (extent + 1 + gen)
    edges = -(2.0**extent) + np.arange(cells + 1) * 2.0**-gen
    if n == 1:
        return GridFunction(1, extent, gen, _power_avg_1d(edges[:-1], edges[1:], beta))
    return GridFunction(2, extent, gen, _power_avg_2d(edges, beta))


def _power_avg_2d(edges: np.ndarray, beta: float) -> np.ndarray:
    h = edges[1] - edges[0]
    # exact integral of |x|^-beta over [0,h]^2 in polar coordinates
    ang, _ = integrate.quad(lambda t: np.cos(t) ** (beta - 2.0), 0.0, math.pi / 4)
    corner = 2.0 * ang / (2.0 - beta) * h ** (2.0 - beta)
    nodes, weights = np.polynomial.legendre.leggauss(12)
    lo, hi = edges[:-1], edges[1:]
    pts = 0.5 * (lo[:, None] + hi[:, None]) + 0.5 * h * nodes[None, :]
    rx = pts[:, None, :, None]
    ry = pts[None, :, None, :]
    w = np.outer(weights, weights) / 4.0
    with np.errstate(divide="ignore"):
        avg = np.sum((rx**2 + ry**2) ** (-beta / 2) * w, axis=(2, 3))
    touching = np.flatnonzero(np.isclose(lo, 0.0) | np.isclose(hi, 0.0))
    for i in touching:
        for j in touching:
            avg[i, j] = corner / h**2
    return avg


# ---------------------------------------------------------------------------
# lattice changes


def dilate(f: GridFunction, m: int, extent: int | None = None, gen: int | None = None) -> GridFunction:
    """The function ``x -> f(2**m x)``.

    The values are untouched and the lattice is rescaled (``G -> G + m``,
    ``E -> E - m``), which is exact.  Passing ``extent``/``gen`` re-expresses
    the result on that lattice via :func:`embed`.
    """
    g = GridFunction(f.n, f.extent - m, f.gen + m, f.values)
    if extent is None and gen is None:
        return g
    return embed(g, g.extent if extent is None else extent, g.gen if gen is None else gen)


def embed(f: GridFunction, extent: int, gen: int) -> GridFunction:
    """Re-express ``f`` on another lattice; raises if that loses information."""
    vals = f.values
    if gen > f.gen:
        r = 2 ** (gen - f.gen)
        for ax in range(f.n):
            vals = np.repeat(vals, r, axis=ax)
    elif gen < f.gen:
        r = 2 ** (f.gen - gen)
        coarse = vals
        for ax in range(f.n):
            shape = coarse.shape[:ax] + (coarse.shape[ax] // r, r) + coarse.shape[ax + 1 :]
            blocks = coarse.reshape(shape)
            if not np.all(blocks == np.take(blocks, [0], axis=ax + 1)):
                raise AlignmentError(f"function is not constant on generation-{gen} cells")
            coarse = np.take(blocks, 0, axis=ax + 1)
        vals = coarse
    cur = vals.shape[0]
    want = 2 ** (extent + 1 + gen)
    if want > cur:
        pad = (want - cur) // 2
        vals = np.pad(vals, [(pad, pad)] * f.n)
    elif want < cur:
        cut = (cur - want) // 2
        keep = tuple(slice(cut, cut + want) for _ in range(f.n))
        mask = np.ones(vals.shape, dtype=bool)
        mask[keep] = False
        if np.any(vals[mask]):
            raise DomainError(f"support does not fit the domain of extent {extent}")
        vals = vals[keep]
    return GridFunction(f.n, extent, gen, vals)


# ---------------------------------------------------------------------------
# norms


def lq_norm_on(f: GridFunction, q: float, region: Region) -> float:
    """``||f||_{L^q(region)}`` for a grid-aligned region."""
    if q <= 0:
        raise ValueError("q must be positive")
    if not region.aligned_to(f.gen):
        raise AlignmentError(f"region is not aligned to generation {f.gen}")
    r = Fraction(2) ** f.extent
    sl = []
    for a, b in zip(region.lo, region.hi):
        i0 = max(0, min(f.cells, int((a + r) * 2**f.gen)))
        i1 = max(0, min(f.cells, int((b + r) * 2**f.gen)))
        sl.append(slice(i0, i1))
    block = f.values[tuple(sl)]
    return float(np.sum(block**q) * f.cell_volume) ** (1.0 / q)


def _prefix(a: np.ndarray) -> np.ndarray:
    out = a
    for ax in range(a.ndim):
        out = np.cumsum(out, axis=ax)
    return np.pad(out, [(1, 0)] * a.ndim)


def _box_sums(P: np.ndarray, starts: np.ndarray, w: int) -> np.ndarray:
    """Sums over boxes ``[s, s+w)`` per axis, clipped to the grid.

    ``starts`` are cell indices along one axis (may run outside the grid);
    the result has shape ``(len(starts),) * ndim``.
    """
    N = P.shape[0] - 1
    a = np.clip(starts, 0, N)
    b = np.clip(starts + w, 0, N)
    if P.ndim == 1:
        out = P[b] - P[a]
    else:
        out = (
            P[np.ix_(b, b)] - P[np.ix_(a, b)] - P[np.ix_(b, a)] + P[np.ix_(a, a)]
        )
    return np.maximum(out, 0.0)


def _score(mass: np.ndarray, side: float, n: int, p: float, q: float) -> np.ndarray:
    # |Q|^{1/p - 1/q} ||f||_{L^q(Q)} from the cube mass  int_Q f^q
    return (side**n) ** (1.0 / p - 1.0 / q) * mass ** (1.0 / q)


def _mass_prefix(f: GridFunction, q: float) -> np.ndarray:
    return _prefix(f.values**q * f.cell_volume)


def dyadic_scores(f: GridFunction, p: float, q: float, slack: int = WINDOW_SLACK):
    """Yield ``(j, scores)`` for every generation in ``[-E - slack, G]``."""
    P = _mass_prefix(f, q)
    N, O = f.cells, f.origin
    for j in range(f.gen, -f.extent - slack - 1, -1):
        w = 2 ** (f.gen - j)
        kmin = -(O // w) if O % w == 0 else -(O // w) - 1
        kmax = -((O - N) // w)  # exclusive, ceil((N - O)/w)
        starts = O + np.arange(kmin, kmax) * w
        yield j, _score(_box_sums(P, starts, w), 2.0**-j, f.n, p, q)


def morrey_norm_dyadic(f: GridFunction, mp: MorreyParams | tuple, slack: int = WINDOW_SLACK) -> float:
    """Morrey norm with the sup taken over dyadic cubes.

    For piecewise-constant compactly supported ``f`` the sup is attained in
    generations ``[-E - slack, G]``: finer cubes score ``|Q|^{1/p}`` times a
    cell value and coarser ones only add volume.
    """
    p, q = _pq(mp)
    best = 0.0
    for _, s in dyadic_scores(f, p, q, slack):
        best = max(best, float(s.max()))
    return best


def morrey_norm_general(f: GridFunction, mp: MorreyParams | tuple) -> float:
    """Morrey norm with the sup over every grid-aligned cube in the domain."""
    p, q = _pq(mp)
    P = _mass_prefix(f, q)
    N = f.cells
    best = 0.0
    for w in range(1, N + 1):
        s = _score(_box_sums(P, np.arange(0, N - w + 1), w), w * f.h, f.n, p, q)
        best = max(best, float(s.max()))
    return best


def _pq(mp) -> tuple[float, float]:
    if isinstance(mp, MorreyParams):
        return mp.p, mp.q
    return MorreyParams(*mp).p, MorreyParams(*mp).q


# ---------------------------------------------------------------------------
# maximal operators


def _trailing_max(a: np.ndarray, w: int, ax: int) -> np.ndarray:
    # out[i] = max(a[i : i + w]) along one axis
    return maximum_filter1d(a, w, axis=ax, origin=-(w // 2), mode="constant", cval=-np.inf)


def hl_maximal(f: GridFunction) -> GridFunction:
    """Uncentered maximal function over grid-aligned cubes, at cell centers.

    Cubes may stick out of the domain; ``f`` vanishes there.
    """
    N = f.cells
    P = _prefix(f.values * f.cell_volume)
    out = np.zeros_like(f.values)
    for w in range(1, N + 1):
        # cube [a, a + w) contains cell i iff a in [i - w + 1, i]
        starts = np.arange(-(w - 1), N)
        avg = _box_sums(P, starts, w) / (w * f.h) ** f.n
        for ax in range(f.n):
            avg = _trailing_max(avg, w, ax)
        np.maximum(out, avg[(slice(0, N),) * f.n], out=out)
    return f.with_values(out)


def powered_maximal(f: GridFunction, eta: float) -> GridFunction:
    """Centered maximal function ``(sup_R avg_{B(x,R)} f^eta)^{1/eta}``.

    Balls are cubes centered at the cell center with half-side ``(r + 1/2) h``.
    In 1D the sup over all real radii is attained at these radii, because the
    average is a ratio of linear functions of ``R`` between them.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    N = f.cells
    P = _prefix(f.values**eta * f.cell_volume)
    idx = np.arange(N)
    best = np.zeros_like(f.values)
    for r in range(N):
        a = np.clip(idx - r, 0, N)
        b = np.clip(idx + r + 1, 0, N)
        if f.n == 1:
            mass = P[b] - P[a]
        else:
            mass = P[np.ix_(b, b)] - P[np.ix_(a, b)] - P[np.ix_(b, a)] + P[np.ix_(a, a)]
        np.maximum(best, np.maximum(mass, 0.0) / ((2 * r + 1) * f.h) ** f.n, out=best)
    return f.with_values(best ** (1.0 / eta))
