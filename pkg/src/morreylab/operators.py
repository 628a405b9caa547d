"""Fractional integrals, bilinear fractional integrals and their dyadic surrogates.

All grid evaluators sample at cell centers.  Seen from a cell center ``x``,
the integrand ``f1(x + y) f2(x - y)`` is constant on every cell-shaped
``y``-interval ``[(d - 1/2) h, (d + 1/2) h)``, so every 1D operator reduces to
``sum_d w(d) f1[i + d] f2[i - d]`` with weights ``w`` that are exact cell
integrals of the kernel.  In 2D the off-center weights use the midpoint rule.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import integrate, signal

from .dyadic import DyadicCube
from .grid import (
    WINDOW_SLACK,
    AlignmentError,
    GridError,
    GridFunction,
    _box_sums,
    _prefix,
    _require_same,
    powered_maximal,
)

__all__ = [
    "check_alpha",
    "frac_integral",
    "powered_frac",
    "bilinear_grafakos",
    "bilinear_ks",
    "dyadic_majorant",
    "surrogate_sigma",
    "sigma_terms",
    "sigma_tail",
    "tail_sum",
    "window_integral",
    "local_average",
    "local_average_all",
    "frac_integral_at",
    "bilinear_grafakos_at",
    "dyadic_majorant_at",
    "conjugate",
]


def conjugate(u: float) -> float:
    return math.inf if u == 1 else u / (u - 1.0)


def check_alpha(alpha: float, n: int, upper: float | None = None) -> None:
    upper = n if upper is None else upper
    if not 0 < alpha < upper:
        raise ValueError(f"alpha must lie in (0, {upper}), got {alpha}")


# ---------------------------------------------------------------------------
# weights over cell offsets; arrays are indexed by d + (N - 1)


def _offsets(N: int) -> np.ndarray:
    return np.arange(-(N - 1), N, dtype=np.float64)


def _signed_pow(z: np.ndarray, a: float) -> np.ndarray:
    return np.sign(z) * np.abs(z) ** a


@lru_cache(maxsize=8)
def _radial_center_2d(alpha: float) -> float:
    """``int_{[-1/2,1/2]^2} |z|^{alpha-2} dz`` in polar coordinates."""
    val, _ = integrate.quad(lambda t: (2.0 * math.cos(t)) ** (-alpha), 0.0, math.pi / 4)
    return 8.0 * val / alpha


def riesz_weights(alpha: float, n: int, N: int, h: float) -> np.ndarray:
    """Cell integrals of ``|y|^{alpha-n}`` over the cell at offset ``d``."""
    d = _offsets(N)
    if n == 1:
        hi = _signed_pow(d + 0.5, alpha)
        lo = _signed_pow(d - 0.5, alpha)
        return h**alpha * (hi - lo) / alpha
    r = np.hypot(d[:, None], d[None, :])
    with np.errstate(divide="ignore"):
        w = h**alpha * r ** (alpha - 2.0)
    w[N - 1, N - 1] = h**alpha * _radial_center_2d(alpha)
    return w


def _overlap(d: np.ndarray, h: float, r: float) -> np.ndarray:
    # |[(d - 1/2) h, (d + 1/2) h) cap (-r, r)|
    return np.clip(np.minimum(r, (d + 0.5) * h) - np.maximum(-r, (d - 0.5) * h), 0.0, None)


def window_weights(r: float, n: int, N: int, h: float) -> np.ndarray:
    """Overlap of each offset cell with the ball ``(-r, r)^n``."""
    o = _overlap(_offsets(N), h, r)
    return o if n == 1 else np.multiply.outer(o, o)


def majorant_weights(alpha: float, n: int, N: int, extent: int, gen: int) -> np.ndarray:
    """``sum_l 2^{l(n-alpha)} * window_weights(2^-l)`` over all ``l >= -E - c``."""
    h = 2.0**-gen
    w = np.zeros((2 * N - 1,) * n)
    for l in range(-extent - WINDOW_SLACK, gen + 1):
        w += 2.0 ** (l * (n - alpha)) * window_weights(2.0**-l, n, N, h)
    # l > G: the ball sits inside the central cell and has volume (2 r)^n
    tail = 2.0**n * 2.0 ** (-(gen + 1) * alpha) / (1.0 - 2.0**-alpha)
    w[(N - 1,) * n] += tail
    return w


def _bilinear_pass(a: np.ndarray, b: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``out[i] = sum_d w[d] a[i + d] b[i - d]`` with zero extension."""
    N = a.shape[0]
    out = np.zeros_like(a)
    half = (N + 1) // 2  # |d| < N/2 leaves a nonempty index range
    if a.ndim == 1:
        for d in range(-half + 1, half):
            m = abs(d)
            if m >= N - m:
                continue
            out[m : N - m] += w[d + N - 1] * a[m + d : N - m + d] * b[m - d : N - m - d]
        return out
    for d0 in range(-half + 1, half):
        m0 = abs(d0)
        if m0 >= N - m0:
            continue
        for d1 in range(-half + 1, half):
            m1 = abs(d1)
            if m1 >= N - m1:
                continue
            out[m0 : N - m0, m1 : N - m1] += (
                w[d0 + N - 1, d1 + N - 1]
                * a[m0 + d0 : N - m0 + d0, m1 + d1 : N - m1 + d1]
                * b[m0 - d0 : N - m0 - d0, m1 - d1 : N - m1 - d1]
            )
    return out


# ---------------------------------------------------------------------------
# linear fractional integrals


def frac_integral(f: GridFunction, alpha: float) -> GridFunction:
    """Riesz potential ``I_alpha f`` at cell centers."""
    check_alpha(alpha, f.n)
    N = f.cells
    w = riesz_weights(alpha, f.n, N, f.h)
    if f.n == 1:
        out = np.convolve(f.values, w)[N - 1 : 2 * N - 1]
    else:
        out = signal.fftconvolve(f.values, w)[N - 1 : 2 * N - 1, N - 1 : 2 * N - 1]
        out = np.maximum(out, 0.0)
    return f.with_values(out)


def powered_frac(f: GridFunction, alpha: float, u: float) -> GridFunction:
    """``I_alpha^{(u)} f = (I_alpha(f^u))^{1/u}``."""
    if not u >= 1:
        raise ValueError(f"u must be >= 1, got {u}")
    if u == 1:
        return frac_integral(f, alpha)
    g = frac_integral(f.with_values(f.values**u), alpha)
    return g.with_values(g.values ** (1.0 / u))


# ---------------------------------------------------------------------------
# bilinear operators


def bilinear_grafakos(f1: GridFunction, f2: GridFunction, alpha: float) -> GridFunction:
    """``J_alpha[f1, f2](x) = int f1(x+y) f2(x-y) |y|^{alpha-n} dy`` at cell centers."""
    _require_same(f1, f2)
    check_alpha(alpha, f1.n)
    w = riesz_weights(alpha, f1.n, f1.cells, f1.h)
    return f1.with_values(_bilinear_pass(f1.values, f2.values, w))


def _ks_center_1d(alpha: float, h: float) -> float:
    # int over [-h/2, h/2]^2 of (|z1| + |z2|)^{alpha-2}
    a = h / 2.0
    if alpha == 1.0:
        return 8.0 * a * math.log(2.0)
    ratio = 2.0 * math.expm1((alpha - 1.0) * math.log(2.0)) / (alpha - 1.0)
    return 4.0 * a**alpha * ratio / alpha


@lru_cache(maxsize=8)
def _ks_center_2d(alpha: float, m: int = 12) -> float:
    # int over [-1/2,1/2]^4 of (|z1| + |z2|)^{alpha-4}, via self-similarity:
    # the inner cube [-1/4,1/4]^4 carries 2^-alpha of the total.
    c = (np.arange(m) + 0.5) / m - 0.5
    g = np.stack(np.meshgrid(c, c, c, c, indexing="ij"), axis=0)
    inner = np.all(np.abs(g) < 0.25, axis=0)
    r = np.hypot(g[0], g[1]) + np.hypot(g[2], g[3])
    vals = np.where(inner, 0.0, r ** (alpha - 4.0))
    shell = vals.sum() / m**4
    return shell / (1.0 - 2.0**-alpha)


def ks_kernel(alpha: float, n: int, N: int, h: float) -> np.ndarray:
    """Midpoint cell-pair weights for ``(|y1| + |y2|)^{alpha-2n}``."""
    d = _offsets(N)
    if n == 1:
        s = np.abs(d)[:, None] + np.abs(d)[None, :]
        with np.errstate(divide="ignore"):
            K = h**2 * (h * s) ** (alpha - 2.0)
        K[N - 1, N - 1] = _ks_center_1d(alpha, h)
        return K
    rad = np.hypot(d[:, None], d[None, :]).ravel()
    s = rad[:, None] + rad[None, :]
    with np.errstate(divide="ignore"):
        K = h**4 * (h * s) ** (alpha - 4.0)
    c = (N - 1) * (2 * N - 1) + (N - 1)
    K[c, c] = h**alpha * _ks_center_2d(alpha)
    return K


def _offset_windows(a: np.ndarray) -> np.ndarray:
    # rows i hold a[i + d] for d in [-(N-1), N-1], flattened in 2D
    N = a.shape[0]
    pad = np.pad(a, [(N - 1, N - 1)] * a.ndim)
    win = np.lib.stride_tricks.sliding_window_view(pad, (2 * N - 1,) * a.ndim)
    return win.reshape(N**a.ndim, (2 * N - 1) ** a.ndim)


def bilinear_ks(f1: GridFunction, f2: GridFunction, alpha: float) -> GridFunction:
    """``I_alpha[f1, f2](x) = iint f1 f2 (|x-y1| + |x-y2|)^{alpha-2n}`` at cell centers."""
    _require_same(f1, f2)
    check_alpha(alpha, f1.n, upper=2 * f1.n)
    K = ks_kernel(alpha, f1.n, f1.cells, f1.h)
    A = _offset_windows(f1.values)
    B = _offset_windows(f2.values)
    out = np.einsum("id,id->i", A, B @ K.T)
    return f1.with_values(np.maximum(out, 0.0).reshape(f1.values.shape))


def dyadic_majorant(f1: GridFunction, f2: GridFunction, alpha: float) -> GridFunction:
    """The dyadic envelope ``sum_l 2^{l(n-alpha)} int_{B(2^-l)} f1(x+y) f2(x-y) dy``.

    ``l`` runs from ``-E - c`` (coarser balls see the same mass) to infinity;
    scales finer than the grid are summed in closed form.
    """
    _require_same(f1, f2)
    check_alpha(alpha, f1.n)
    w = majorant_weights(alpha, f1.n, f1.cells, f1.extent, f1.gen)
    return f1.with_values(_bilinear_pass(f1.values, f2.values, w))


def window_integral(f1: GridFunction, f2: GridFunction, r: float) -> GridFunction:
    """``int_{B(r)} f1(x+y) f2(x-y) dy`` at cell centers, ``B(r) = (-r, r)^n``."""
    _require_same(f1, f2)
    w = window_weights(r, f1.n, f1.cells, f1.h)
    return f1.with_values(_bilinear_pass(f1.values, f2.values, w))


def sigma_terms(
    f1: GridFunction, f2: GridFunction, alpha: float, fine_tail: bool = True
) -> list[tuple[int, np.ndarray]]:
    """Per-generation pieces of :func:`surrogate_sigma`, coarse to fine.

    Generations run over ``[-E - c, G]``, plus ``G + 1`` when ``fine_tail``
    (the generations beyond that are summed by :func:`sigma_tail`).
    """
    _require_same(f1, f2)
    check_alpha(alpha, f1.n, upper=2 * f1.n)
    n, N, O = f1.n, f1.cells, f1.origin
    P1 = _prefix(f1.values * f1.cell_volume)
    P2 = _prefix(f2.values * f2.cell_volume)
    cells = np.arange(N)
    out = []
    for j in range(-f1.extent - WINDOW_SLACK, f1.gen + 1):
        w = 2 ** (f1.gen - j)
        k = (cells - O) // w
        kmin = int(k[0])
        ks = np.arange(kmin, int(k[-1]) + 1)
        starts = O + (ks - 1) * w  # 3Q = [(k-1) l, (k+2) l)
        m1 = _box_sums(P1, starts, 3 * w)
        m2 = _box_sums(P2, starts, 3 * w)
        side = 2.0**-j
        per_cube = side ** (alpha - 2 * n) * m1 * m2
        sel = k - kmin
        term = per_cube[sel] if n == 1 else per_cube[np.ix_(sel, sel)]
        out.append((j, term))
    if fine_tail:
        # the half-cell cube [x, x + h/2) has 3Q = [x - h/2, x + h) per axis
        h = f1.h
        side = h / 2
        m1 = _half_step_mass(f1.values, h)
        m2 = _half_step_mass(f2.values, h)
        out.append((f1.gen + 1, side ** (alpha - 2 * n) * m1 * m2))
    return out


def _half_step_mass(v: np.ndarray, h: float) -> np.ndarray:
    # int of f over prod [x - h/2, x + h) for every cell center x
    m = v * h**v.ndim
    for ax in range(v.ndim):
        nxt = np.zeros_like(m)
        src = [slice(None)] * v.ndim
        dst = [slice(None)] * v.ndim
        src[ax] = slice(1, None)
        dst[ax] = slice(0, -1)
        nxt[tuple(dst)] = m[tuple(src)]
        m = m + 0.5 * nxt
    return m


def sigma_tail(f1: GridFunction, f2: GridFunction, alpha: float) -> tuple[int, np.ndarray]:
    """Generations ``j >= G + 2`` of the surrogate sum, as ``(G + 2, coef)``.

    There ``3Q`` sits inside the cell of ``x`` and the term is
    ``coef * 2^{-j alpha}`` with ``coef = 9^n f1 f2``.
    """
    _require_same(f1, f2)
    return f1.gen + 2, 9.0**f1.n * f1.values * f2.values


def tail_sum(alpha: float, j0: int, j1: float = math.inf) -> float:
    """``sum_{j0 <= j < j1} 2^{-j alpha}``."""
    r = 2.0**-alpha
    head = r**j0 / (1.0 - r)
    if math.isinf(j1):
        return head
    if j1 <= j0:
        return 0.0
    return head * (1.0 - r ** (j1 - j0))


def surrogate_sigma(
    f1: GridFunction, f2: GridFunction, alpha: float, fine_tail: bool = True
) -> GridFunction:
    """``sum_Q chi_Q l(Q)^{alpha-2n} (int_{3Q} f1)(int_{3Q} f2)`` at cell centers.

    Cubes coarser than generation ``-E - c`` are dropped.  With
    ``fine_tail=False`` cubes finer than the grid are dropped as well.
    """
    total = np.zeros_like(f1.values)
    for _, term in sigma_terms(f1, f2, alpha, fine_tail):
        total = total + term
    if fine_tail:
        j0, coef = sigma_tail(f1, f2, alpha)
        total = total + coef * tail_sum(alpha, j0)
    return f1.with_values(total)


def local_average(
    f1: GridFunction, f2: GridFunction, l: int, v: float, cube: DyadicCube
) -> tuple[float, float]:
    """Both sides of the local averaging estimate on the cube ``Q`` of generation ``l``.

    Returns ``(lhs, rhs)`` with ``lhs = ||int_{B(2^-l)} f1(.+y) f2(.-y) dy||_{L^v(Q)}``
    (midpoint rule over cells) and
    ``rhs = |B(2^-l)|^{1+1/v} inf_Q M^(v) f1 * inf_Q M^(v) f2``.
    """
    _require_same(f1, f2)
    if cube.j != l:
        raise ValueError(f"cube generation {cube.j} differs from l={l}")
    if l > f1.gen:
        raise AlignmentError(f"generation {l} is finer than the grid ({f1.gen})")
    if cube.n != f1.n:
        raise GridError("cube dimension differs from the function's")
    if v < 1:
        raise ValueError("v must be >= 1")
    r = 2.0**-l
    w = 2 ** (f1.gen - l)
    sl = []
    for kc in cube.k:
        a = f1.origin + kc * w
        if a < 0 or a + w > f1.cells:
            raise GridError("cube lies outside the domain")
        sl.append(slice(a, a + w))
    sl = tuple(sl)
    W = window_integral(f1, f2, r).values[sl]
    lhs = float(np.sum(W**v) * f1.cell_volume) ** (1.0 / v)
    m1 = float(powered_maximal(f1, v).values[sl].min())
    m2 = float(powered_maximal(f2, v).values[sl].min())
    ball = (2.0 * r) ** f1.n
    return lhs, ball ** (1.0 + 1.0 / v) * m1 * m2


def local_average_all(
    f1: GridFunction, f2: GridFunction, l: int, v: float
) -> tuple[np.ndarray, np.ndarray]:
    """:func:`local_average` for every generation-``l`` cube of the domain at once.

    Arrays are indexed by cube position along each axis, lowest corner first.
    """
    _require_same(f1, f2)
    if l > f1.gen:
        raise AlignmentError(f"generation {l} is finer than the grid ({f1.gen})")
    if l < -f1.extent:
        raise GridError(f"generation {l} is coarser than the domain")
    if v < 1:
        raise ValueError("v must be >= 1")
    r = 2.0**-l
    w = 2 ** (f1.gen - l)
    m = f1.cells // w
    shape = sum(((m, w) for _ in range(f1.n)), ())
    W = window_integral(f1, f2, r).values ** v
    axes = tuple(range(1, 2 * f1.n, 2))
    lhs = (W.reshape(shape).sum(axis=axes) * f1.cell_volume) ** (1.0 / v)
    m1 = powered_maximal(f1, v).values.reshape(shape).min(axis=axes)
    m2 = powered_maximal(f2, v).values.reshape(shape).min(axis=axes)
    ball = (2.0 * r) ** f1.n
    return lhs, ball ** (1.0 + 1.0 / v) * m1 * m2


# ---------------------------------------------------------------------------
# exact point evaluation (1D) at arbitrary x


def _require_1d(f: GridFunction):
    if f.n != 1:
        raise GridError("point evaluation is implemented for n = 1 only")


def frac_integral_at(f: GridFunction, alpha: float, x: float) -> float:
    _require_1d(f)
    check_alpha(alpha, 1)
    e = f.edges()
    F = _signed_pow(e - x, alpha) / alpha
    return float(np.sum(f.values * (F[1:] - F[:-1])))


def _pieces(f1: GridFunction, f2: GridFunction, x: float):
    """Breakpoints in ``y`` and the value of ``f1(x+y) f2(x-y)`` per piece."""
    e = f1.edges()
    R = 2.0 ** (f1.extent + 1)
    bp = np.unique(np.concatenate([e - x, x - e, [0.0]]))
    bp = bp[(bp >= -R) & (bp <= R)]
    mid = 0.5 * (bp[1:] + bp[:-1])

    def sample(f, pts):
        idx = np.floor((pts + 2.0**f.extent) / f.h).astype(np.int64)
        ok = (idx >= 0) & (idx < f.cells)
        out = np.zeros_like(pts)
        out[ok] = f.values[idx[ok]]
        return out

    return bp, sample(f1, x + mid) * sample(f2, x - mid)


def bilinear_grafakos_at(f1: GridFunction, f2: GridFunction, alpha: float, x: float) -> float:
    """Exact ``J_alpha[f1, f2](x)`` at any point."""
    _require_same(f1, f2)
    _require_1d(f1)
    check_alpha(alpha, 1)
    bp, g = _pieces(f1, f2, x)
    F = _signed_pow(bp, alpha) / alpha
    return float(np.sum(g * (F[1:] - F[:-1])))


def dyadic_majorant_at(f1: GridFunction, f2: GridFunction, alpha: float, x: float) -> float:
    """Exact dyadic majorant at any point."""
    _require_same(f1, f2)
    _require_1d(f1)
    check_alpha(alpha, 1)
    bp, g = _pieces(f1, f2, x)
    nz = np.abs(bp[bp != 0.0])
    delta = float(nz.min()) if nz.size else math.inf
    l = -f1.extent - WINDOW_SLACK
    total = 0.0
    while 2.0**-l > delta:
        r = 2.0**-l
        length = np.clip(np.minimum(bp[1:], r) - np.maximum(bp[:-1], -r), 0.0, None)
        total += 2.0 ** (l * (1.0 - alpha)) * float(np.sum(g * length))
        l += 1
    # from here the ball (-r, r) sees only the two pieces touching 0
    zero = int(np.searchsorted(bp, 0.0))
    g_right = g[zero] if zero < g.size else 0.0
    g_left = g[zero - 1] if zero > 0 else 0.0
    total += (g_left + g_right) * 2.0 ** (-l * alpha) / (1.0 - 2.0**-alpha)
    return float(total)
