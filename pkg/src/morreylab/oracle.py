"""Brute-force reference evaluators (1D, cell centers).

Direct nested loops over real coordinates: no prefix sums, no separability,
no precomputed weight tables.  Production evaluators are checked against
these on small grids.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .grid import WINDOW_SLACK, GridError, GridFunction, _require_same
from .operators import check_alpha

__all__ = ["MAX_ORACLE_GEN", "ORACLES", "run_oracle"]

MAX_ORACLE_GEN = 7


@njit(cache=True)
def _int_pow_dist(x, a, b, alpha):
    # int_a^b |x - y|^{alpha - 1} dy
    if x <= a:
        return ((b - x) ** alpha - (a - x) ** alpha) / alpha
    if x >= b:
        return ((x - a) ** alpha - (x - b) ** alpha) / alpha
    return ((x - a) ** alpha + (b - x) ** alpha) / alpha


@njit(cache=True)
def _locate(pt, left, h, N):
    i = int(math.floor((pt - left) / h))
    if i < 0 or i >= N:
        return -1
    return i


@njit(cache=True)
def _frac_integral(vals, left, h, alpha):
    N = vals.shape[0]
    out = np.zeros(N)
    for i in range(N):
        x = left + (i + 0.5) * h
        acc = 0.0
        for j in range(N):
            if vals[j] != 0.0:
                a = left + j * h
                acc += vals[j] * _int_pow_dist(x, a, a + h, alpha)
        out[i] = acc
    return out


@njit(cache=True)
def _grafakos(v1, v2, left, h, alpha):
    N = v1.shape[0]
    out = np.zeros(N)
    for i in range(N):
        x = left + (i + 0.5) * h
        acc = 0.0
        for j in range(N):
            if v1[j] == 0.0:
                continue
            ya = left + j * h - x
            yb = ya + h
            k = _locate(x - 0.5 * (ya + yb), left, h, N)
            if k < 0 or v2[k] == 0.0:
                continue
            # |y|^{alpha-1} integrated over [ya, yb] is |0 - y| about x = 0
            acc += v1[j] * v2[k] * _int_pow_dist(0.0, ya, yb, alpha)
        out[i] = acc
    return out


@njit(cache=True)
def _ks(v1, v2, left, h, alpha):
    N = v1.shape[0]
    out = np.zeros(N)
    a = 0.5 * h
    if alpha == 1.0:
        center = 8.0 * a * math.log(2.0)
    else:
        center = 4.0 * ((2.0 * a) ** alpha - 2.0 * a**alpha) / ((alpha - 1.0) * alpha)
    for i in range(N):
        x = left + (i + 0.5) * h
        acc = 0.0
        for j in range(N):
            if v1[j] == 0.0:
                continue
            y1 = left + (j + 0.5) * h
            for k in range(N):
                if v2[k] == 0.0:
                    continue
                if j == i and k == i:
                    acc += v1[j] * v2[k] * center
                else:
                    y2 = left + (k + 0.5) * h
                    s = abs(x - y1) + abs(x - y2)
                    acc += v1[j] * v2[k] * h * h * s ** (alpha - 2.0)
        out[i] = acc
    return out


@njit(cache=True)
def _window(v1, v2, left, h, x, r):
    N = v1.shape[0]
    acc = 0.0
    for j in range(N):
        if v1[j] == 0.0:
            continue
        ya = left + j * h - x
        yb = ya + h
        lo = max(ya, -r)
        hi = min(yb, r)
        if hi <= lo:
            continue
        k = _locate(x - 0.5 * (ya + yb), left, h, N)
        if k < 0:
            continue
        acc += v1[j] * v2[k] * (hi - lo)
    return acc


@njit(cache=True)
def _majorant(v1, v2, left, h, alpha, lstart, gen):
    N = v1.shape[0]
    out = np.zeros(N)
    for i in range(N):
        x = left + (i + 0.5) * h
        acc = 0.0
        l = lstart
        while True:
            term = 2.0 ** (l * (1.0 - alpha)) * _window(v1, v2, left, h, x, 2.0 ** (-l))
            acc += term
            if l > gen and (term == 0.0 or term < 1e-18 * acc):
                break
            l += 1
        out[i] = acc
    return out


@njit(cache=True)
def _mass(vals, left, h, a, b):
    # a, b and the cell edges are offsets from x = 0
    N = vals.shape[0]
    acc = 0.0
    for j in range(N):
        lo = max(a, left + j * h)
        hi = min(b, left + (j + 1) * h)
        if hi > lo:
            acc += vals[j] * (hi - lo)
    return acc


@njit(cache=True)
def _sigma(v1, v2, left, h, alpha, lstart, gen, fine_tail):
    N = v1.shape[0]
    out = np.zeros(N)
    for i in range(N):
        x = left + (i + 0.5) * h
        acc = 0.0
        j = lstart
        while True:
            side = 2.0 ** (-j)
            # offsets from x keep tiny cubes resolvable in floating point
            frac = x / side - np.floor(x / side)
            a = side * (-1.0 - frac)
            b = side * (2.0 - frac)
            shifted = left - x
            term = side ** (alpha - 2.0) * _mass(v1, shifted, h, a, b) * _mass(v2, shifted, h, a, b)
            acc += term
            j += 1
            if j > gen and not fine_tail:
                break
            if j > gen + 1 and (term == 0.0 or term < 1e-18 * acc):
                break
        out[i] = acc
    return out


@njit(cache=True)
def _maximal(vals, h):
    N = vals.shape[0]
    out = np.zeros(N)
    for i in range(N):
        best = 0.0
        for a in range(0, i + 1):
            acc = 0.0
            for b in range(a, N):
                acc += vals[b]
                if b >= i:
                    avg = acc / (b - a + 1)
                    if avg > best:
                        best = avg
        out[i] = best
    return out


@njit(cache=True)
def _maximal_centered(vals, eta):
    N = vals.shape[0]
    out = np.zeros(N)
    for i in range(N):
        best = 0.0
        for r in range(N):
            acc = 0.0
            for m in range(i - r, i + r + 1):
                if 0 <= m < N:
                    acc += vals[m] ** eta
            avg = acc / (2 * r + 1)
            if avg > best:
                best = avg
        out[i] = best ** (1.0 / eta)
    return out


def _guard(*fs: GridFunction):
    for f in fs:
        if f.n != 1:
            raise GridError("oracles are implemented for n = 1 only")
        if f.gen > MAX_ORACLE_GEN:
            raise GridError(f"oracle refuses G={f.gen} > {MAX_ORACLE_GEN}")
    if len(fs) == 2:
        _require_same(*fs)


def _left(f: GridFunction) -> float:
    return -(2.0**f.extent)


def oracle_frac_integral(f, alpha):
    _guard(f)
    check_alpha(alpha, 1)
    return f.with_values(_frac_integral(f.values, _left(f), f.h, float(alpha)))


def oracle_powered_frac(f, alpha, u):
    g = oracle_frac_integral(f.with_values(f.values**u), alpha)
    return g.with_values(g.values ** (1.0 / u))


def oracle_grafakos(f1, f2, alpha):
    _guard(f1, f2)
    check_alpha(alpha, 1)
    return f1.with_values(_grafakos(f1.values, f2.values, _left(f1), f1.h, float(alpha)))


def oracle_ks(f1, f2, alpha):
    _guard(f1, f2)
    check_alpha(alpha, 1, upper=2)
    return f1.with_values(_ks(f1.values, f2.values, _left(f1), f1.h, float(alpha)))


def oracle_majorant(f1, f2, alpha):
    _guard(f1, f2)
    check_alpha(alpha, 1)
    lstart = -f1.extent - WINDOW_SLACK
    vals = _majorant(f1.values, f2.values, _left(f1), f1.h, float(alpha), lstart, f1.gen)
    return f1.with_values(vals)


def oracle_sigma(f1, f2, alpha, fine_tail=True):
    _guard(f1, f2)
    check_alpha(alpha, 1, upper=2)
    lstart = -f1.extent - WINDOW_SLACK
    vals = _sigma(f1.values, f2.values, _left(f1), f1.h, float(alpha), lstart, f1.gen, fine_tail)
    return f1.with_values(vals)


def oracle_maximal(f):
    _guard(f)
    # the uncentered sup never gains from leaving the domain
    return f.with_values(_maximal(f.values, f.h))


def oracle_maximal_pow(f, eta):
    _guard(f)
    return f.with_values(_maximal_centered(f.values, float(eta)))


ORACLES = {
    "ialpha": ("unary", oracle_frac_integral),
    "ialpha-pow": ("unary-u", oracle_powered_frac),
    "jalpha": ("binary", oracle_grafakos),
    "ks": ("binary", oracle_ks),
    "majorant": ("binary", oracle_majorant),
    "sigma": ("binary", oracle_sigma),
    "maximal": ("plain", oracle_maximal),
    "maximal-pow": ("plain-u", oracle_maximal_pow),
}


def run_oracle(name: str, inputs: list[GridFunction], alpha: float | None = None, u: float | None = None):
    try:
        kind, fn = ORACLES[name]
    except KeyError:
        raise ValueError(f"unknown operator {name!r}") from None
    if kind == "unary":
        return fn(inputs[0], alpha)
    if kind == "unary-u":
        return fn(inputs[0], alpha, u)
    if kind == "binary":
        return fn(inputs[0], inputs[1], alpha)
    if kind == "plain":
        return fn(inputs[0])
    return fn(inputs[0], u)
