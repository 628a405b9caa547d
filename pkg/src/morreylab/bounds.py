"""Exponent algebra and numerical checks of the boundedness chain.

Every implicit constant is empirical: a check reports a measured ratio and
compares it with a constant supplied by the caller (usually a frozen value
from :mod:`morreylab.constants`).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .dyadic import DyadicCube
from .grid import GridError, GridFunction, hl_maximal, morrey_norm_dyadic, _require_same
from .operators import (
    bilinear_grafakos,
    conjugate,
    powered_frac,
    sigma_tail,
    sigma_terms,
    tail_sum,
)

__all__ = [
    "DegenerateInputError",
    "InapplicableError",
    "ExponentTuple",
    "HeYanReport",
    "Block",
    "BlockDecomposition",
    "CheckReport",
    "SplitResult",
    "derive_exponents",
    "check_heyan",
    "check_kenig_stein",
    "block_lemma_check",
    "in_block_regime",
    "split_profile",
    "s1_s2_split",
    "optimal_L",
    "theorem_ratio",
    "holder_route_ratio",
]

REL = 1e-12


class DegenerateInputError(ValueError):
    """Input makes a ratio 0/0 or a scale undefined."""


class InapplicableError(ValueError):
    """The requested check does not apply to these exponents."""


# ---------------------------------------------------------------------------
# exponent algebra


@dataclass(frozen=True)
class ExponentTuple:
    n: int
    alpha: float
    p1: float
    q1: float
    p2: float
    q2: float
    p: float
    q: float
    s: float | None
    t: float | None
    v: float | None
    admissible: bool
    reason: str = ""

    def inputs(self) -> dict:
        return dict(n=self.n, alpha=self.alpha, p1=self.p1, q1=self.q1, p2=self.p2, q2=self.q2)


def derive_exponents(n: int, alpha: float, p1: float, q1: float, p2: float, q2: float) -> ExponentTuple:
    """Fill in ``p, q, s, t, v`` and decide admissibility for the main estimate."""
    if not 0 < alpha < n:
        raise ValueError(f"need 0 < alpha < n, got alpha={alpha}, n={n}")
    if min(p1, q1, p2, q2) <= 0:
        raise ValueError("Morrey exponents must be positive")
    p = 1.0 / (1.0 / p1 + 1.0 / p2)
    q = 1.0 / (1.0 / q1 + 1.0 / q2)
    gap = 1.0 / p - alpha / n
    if gap <= 0:
        return ExponentTuple(n, alpha, p1, q1, p2, q2, p, q, None, None, None, False,
                             "1/p <= alpha/n: no finite target exponent")
    s = 1.0 / gap
    t = s * q / p
    reasons = []
    if not (1 < q1 <= p1 and 1 < q2 <= p2):
        reasons.append("need 1 < q_i <= p_i")
    if not 1 <= t <= s:
        reasons.append("need 1 <= t <= s")
    if not s < min(q1, q2):
        reasons.append("need s < min(q1, q2)")
    admissible = not reasons
    v = 0.5 * (s + min(q1, q2)) if admissible else None
    return ExponentTuple(n, alpha, p1, q1, p2, q2, p, q, s, t, v, admissible, "; ".join(reasons))


@dataclass(frozen=True)
class HeYanReport:
    ratios_equal: bool
    reciprocal_sum: float
    condition_holds: bool
    u: float | None = None
    s1: float | None = None
    s2: float | None = None
    t1: float | None = None
    t2: float | None = None

    @property
    def applicable(self) -> bool:
        return self.ratios_equal and self.condition_holds and self.u is not None


def check_heyan(tup: ExponentTuple) -> HeYanReport:
    """Evaluate the equal-ratio condition and the reciprocal-sum condition."""
    n, a = tup.n, tup.alpha
    ratios_equal = math.isclose(tup.q1 / tup.p1, tup.q2 / tup.p2, rel_tol=REL)
    a1 = a / n * tup.p1
    a2 = a / n * tup.p2
    total = 1.0 / max(conjugate(tup.q1), a1) + 1.0 / max(conjugate(tup.q2), a2)
    holds = total > 1.0
    if not holds:
        return HeYanReport(ratios_equal, total, False)
    # u must satisfy a1 < u < a2' and q2' < u < q1 (and u > 1)
    upper2 = conjugate(a2) if a2 > 1 else math.inf
    lo = max(a1, conjugate(tup.q2), 1.0)
    hi = min(upper2, tup.q1)
    if not lo < hi:
        return HeYanReport(ratios_equal, total, True)
    u = 0.5 * (lo + hi) if math.isfinite(hi) else lo + 1.0
    uc = conjugate(u)
    s1 = u / (u / tup.p1 - a / n)
    s2 = uc / (uc / tup.p2 - a / n)
    t1 = s1 * tup.q1 / tup.p1
    t2 = s2 * tup.q2 / tup.p2
    return HeYanReport(ratios_equal, total, True, u, s1, s2, t1, t2)


def check_kenig_stein(n: int, alpha: float, p1: float, p2: float) -> float | None:
    """Target Lebesgue exponent ``s``, or ``None`` when ``1/p1 + 1/p2 <= alpha/n``."""
    if not (1 < p1 < math.inf and 1 < p2 < math.inf):
        raise ValueError("need 1 < p1, p2 < inf")
    gap = 1.0 / p1 + 1.0 / p2 - alpha / n
    return 1.0 / gap if gap > 0 else None


# ---------------------------------------------------------------------------
# reports


@dataclass
class CheckReport:
    check: str
    params: dict
    ratio: float
    constant: float
    passed: bool | None
    extent: int
    gen: int
    seed: int | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        d = {
            "check": self.check,
            "params": _clean(self.params),
            "ratio": _finite_or_none(self.ratio),
            "constant": _finite_or_none(self.constant),
            "pass": self.passed,
            "extent": self.extent,
            "gen": self.gen,
            "seed": self.seed,
        }
        return json.dumps(d, sort_keys=False, allow_nan=False)

    @classmethod
    def from_json(cls, line: str) -> "CheckReport":
        d = json.loads(line)
        ratio = math.nan if d["ratio"] is None else d["ratio"]
        const = math.nan if d["constant"] is None else d["constant"]
        return cls(d["check"], d["params"], ratio, const, d["pass"], d["extent"], d["gen"], d["seed"])


def _finite_or_none(x: float):
    # JSON has no nan or inf; an infinite ratio still fails its check
    return float(x) if math.isfinite(x) else None


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return _finite_or_none(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _judge(ratio: float, constant: float, tol: float) -> bool:
    return bool(np.isfinite(ratio) and ratio <= constant * (1.0 + tol))


# ---------------------------------------------------------------------------
# block decompositions


@dataclass(frozen=True)
class Block:
    cube: DyadicCube
    a: GridFunction
    lam: float


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: tuple[Block, ...]

    def __post_init__(self):
        for b in self.blocks:
            if b.lam < 0:
                raise ValueError("block coefficients must be nonnegative")
            if not _supported_in(b.a, b.cube):
                raise GridError(f"block function is not supported in {b.cube}")


def _cube_slices(f: GridFunction, cube: DyadicCube):
    if cube.j > f.gen:
        return None
    w = 2 ** (f.gen - cube.j)
    sl = []
    for kc in cube.k:
        a = f.origin + kc * w
        a0, a1 = max(a, 0), min(a + w, f.cells)
        if a0 >= a1:
            return ()
        sl.append(slice(a0, a1))
    return tuple(sl)


def _supported_in(f: GridFunction, cube: DyadicCube) -> bool:
    sl = _cube_slices(f, cube)
    if sl is None:
        # a sub-cell cube can only support the zero function on this grid
        return f.is_zero()
    if sl == ():
        return f.is_zero()
    mask = np.ones(f.values.shape, dtype=bool)
    mask[sl] = False
    return not np.any(f.values[mask])


def in_block_regime(p: float, q: float, s: float, t: float) -> bool:
    strict = 1 < q <= p and 1 < t <= s and q < t and p < s
    endpoint = q == 1 and t == 1 and 1 <= p < s
    return strict or endpoint


def block_lemma_check(
    d: BlockDecomposition, p: float, q: float, s: float, t: float,
    constant: float = 1.0, tol: float = 0.0, seed: int | None = None, name: str = "block",
) -> CheckReport:
    """Compare ``||sum lam_j a_j||_{M^p_q}`` with the norm of its cube envelope."""
    if not in_block_regime(p, q, s, t):
        raise InapplicableError(f"(p,q,s,t)=({p},{q},{s},{t}) outside the block-lemma regime")
    params = dict(p=p, q=q, s=s, t=t, blocks=len(d.blocks))
    if not d.blocks:
        return CheckReport(name, params, 0.0, constant, True, 0, 0, seed, {"lhs": 0.0, "rhs": 0.0})
    ref = d.blocks[0].a
    f = np.zeros_like(ref.values)
    g = np.zeros_like(ref.values)
    for b in d.blocks:
        _require_same(ref, b.a)
        f = f + b.lam * b.a.values
        na = morrey_norm_dyadic(b.a, (s, t))
        chi = np.zeros_like(ref.values)
        sl = _cube_slices(ref, b.cube)
        if sl is None:
            raise GridError(f"cube {b.cube} is finer than the grid")
        chi[sl] = 1.0
        g = g + b.lam * na / float(b.cube.volume) ** (1.0 / s) * chi
    lhs = morrey_norm_dyadic(ref.with_values(f), (p, q))
    rhs = morrey_norm_dyadic(ref.with_values(g), (p, q))
    if rhs == 0.0:
        ratio = 0.0 if lhs == 0.0 else math.inf
    else:
        ratio = lhs / rhs
    return CheckReport(name, params, ratio, constant, _judge(ratio, constant, tol),
                       ref.extent, ref.gen, seed, {"lhs": lhs, "rhs": rhs})


# ---------------------------------------------------------------------------
# the S1 / S2 split


@dataclass(frozen=True)
class SplitResult:
    S1: float
    S2: float
    bound1: float  # L^alpha Mf1(x) Mf2(x)
    bound2: float  # L^{-n/s} ||f1|| ||f2||


def _first_gen_below(L):
    """Smallest ``j`` with ``2**-j <= L``, elementwise."""
    L = np.asarray(L, dtype=float)
    j = -np.floor(np.log2(L))
    j = np.where(2.0**-j > L, j + 1, j)
    j = np.where(2.0 ** -(j - 1) <= L, j - 1, j)
    return j


def _tail(alpha: float, j0, j1=None):
    # sum_{j0 <= j < j1} 2^{-j alpha} with array bounds
    r = 2.0**-alpha
    head = r ** np.asarray(j0, dtype=float) / (1.0 - r)
    if j1 is None:
        return head
    return np.where(j1 > j0, head * (1.0 - r ** np.maximum(j1 - j0, 0)), 0.0)


@dataclass(frozen=True)
class SplitProfile:
    """Everything the split needs, computed once per pair."""

    alpha: float
    sides: np.ndarray  # cube side per generation, coarse to fine
    terms: np.ndarray  # (generations, cells...) surrogate pieces
    tail_gen: int  # first generation summed in closed form
    tail_coef: np.ndarray
    mf1: np.ndarray
    mf2: np.ndarray
    norm1: float
    norm2: float

    @property
    def sigma(self) -> np.ndarray:
        total = np.zeros_like(self.terms[0])
        for term in self.terms:
            total = total + term
        return total + self.tail_coef * tail_sum(self.alpha, self.tail_gen)

    def split_all(self, L) -> tuple[np.ndarray, np.ndarray]:
        """``(S1, S2)`` at every cell center; ``L`` is a scalar or one scale per cell."""
        L = np.broadcast_to(np.asarray(L, dtype=float), self.terms[0].shape)
        if np.any(~(L > 0)):
            raise ValueError("L must be positive")
        s1 = np.zeros_like(self.terms[0])
        s2 = np.zeros_like(self.terms[0])
        for side, term in zip(self.sides, self.terms):
            small = side <= L
            s1 = s1 + np.where(small, term, 0.0)
            s2 = s2 + np.where(small, 0.0, term)
        jL = _first_gen_below(L)
        s1 = s1 + self.tail_coef * _tail(self.alpha, np.maximum(jL, self.tail_gen))
        s2 = s2 + self.tail_coef * _tail(self.alpha, self.tail_gen, jL)
        return s1, s2

    def split(self, idx, L: float) -> tuple[float, float]:
        s1, s2 = self.split_all(L)
        return float(s1[tuple(idx)]), float(s2[tuple(idx)])


def split_profile(f1: GridFunction, f2: GridFunction, alpha: float, tup: ExponentTuple,
                  fine_tail: bool = True) -> SplitProfile:
    terms = sigma_terms(f1, f2, alpha, fine_tail)
    if fine_tail:
        j0, coef = sigma_tail(f1, f2, alpha)
    else:
        j0, coef = f1.gen + 1, np.zeros_like(f1.values)
    return SplitProfile(
        alpha,
        np.array([2.0**-j for j, _ in terms]),
        np.stack([t for _, t in terms]),
        j0,
        coef,
        hl_maximal(f1).values,
        hl_maximal(f2).values,
        morrey_norm_dyadic(f1, (tup.p1, tup.q1)),
        morrey_norm_dyadic(f2, (tup.p2, tup.q2)),
    )


def _index(f: GridFunction, x) -> tuple[int, ...]:
    if isinstance(x, tuple) and all(isinstance(v, (int, np.integer)) for v in x):
        return x
    return f.index_of(x)


def s1_s2_split(f1, f2, alpha: float, tup: ExponentTuple, x, L: float,
                profile: SplitProfile | None = None) -> SplitResult:
    """Split the surrogate sum at ``x`` into cubes with side ``<= L`` and ``> L``.

    ``x`` is a point, or a tuple of cell indices.
    """
    if L <= 0:
        raise ValueError("L must be positive")
    if not tup.admissible:
        raise InapplicableError(f"tuple not admissible: {tup.reason}")
    prof = profile or split_profile(f1, f2, alpha, tup)
    idx = _index(f1, x)
    s1, s2 = prof.split(idx, L)
    mm = float(prof.mf1[idx] * prof.mf2[idx])
    return SplitResult(s1, s2, L**alpha * mm, L ** (-tup.n / tup.s) * prof.norm1 * prof.norm2)


def optimal_L(f1, f2, tup: ExponentTuple, x, profile: SplitProfile | None = None,
              alpha: float | None = None) -> float:
    """The scale balancing ``L^alpha Mf1 Mf2`` against ``L^{-n/s} ||f1|| ||f2||``."""
    if profile is None:
        mf1 = hl_maximal(f1).values
        mf2 = hl_maximal(f2).values
        n1 = morrey_norm_dyadic(f1, (tup.p1, tup.q1))
        n2 = morrey_norm_dyadic(f2, (tup.p2, tup.q2))
    else:
        mf1, mf2, n1, n2 = profile.mf1, profile.mf2, profile.norm1, profile.norm2
    idx = _index(f1, x)
    mm = float(mf1[idx] * mf2[idx])
    if mm <= 0.0:
        raise DegenerateInputError("Mf1(x) Mf2(x) = 0: the optimal scale is undefined")
    return (n1 * n2 / mm) ** (tup.p / tup.n)


# ---------------------------------------------------------------------------
# end-to-end ratios


def theorem_ratio(f1: GridFunction, f2: GridFunction, tup: ExponentTuple,
                  seed: int | None = None, constant: float = math.nan, tol: float = 0.0,
                  t_override: float | None = None) -> CheckReport:
    """``||J_alpha[f1,f2]||_{M^s_t} / (||f1||_{M^{p1}_{q1}} ||f2||_{M^{p2}_{q2}})``.

    ``t_override`` replaces ``t`` for probes off the ``q/p = t/s`` line.
    """
    if tup.s is None:
        raise InapplicableError(tup.reason)
    t = tup.t if t_override is None else t_override
    n1 = morrey_norm_dyadic(f1, (tup.p1, tup.q1))
    n2 = morrey_norm_dyadic(f2, (tup.p2, tup.q2))
    if n1 * n2 == 0.0:
        raise DegenerateInputError("zero input function: ratio is 0/0")
    J = bilinear_grafakos(f1, f2, tup.alpha)
    lhs = morrey_norm_dyadic(J, (tup.s, t))
    ratio = lhs / (n1 * n2)
    passed = bool(np.isfinite(ratio)) if math.isnan(constant) else _judge(ratio, constant, tol)
    params = {**tup.inputs(), "s": tup.s, "t": t}
    return CheckReport("theorem" if t_override is None else "theorem-probe", params, ratio,
                       constant, passed, f1.extent, f1.gen, seed,
                       {"lhs": lhs, "norm1": n1, "norm2": n2})


def holder_route_ratio(f1: GridFunction, f2: GridFunction, tup: ExponentTuple,
                       heyan: HeYanReport, seed: int | None = None) -> CheckReport:
    """Both sides of ``||J|| <= ||I^(u) f1|| ||I^(u') f2||`` in Morrey norms."""
    if not heyan.applicable:
        raise InapplicableError("He-Yan condition fails: the Hölder route is inapplicable")
    if tup.s is None:
        raise InapplicableError(tup.reason)
    u = heyan.u
    J = bilinear_grafakos(f1, f2, tup.alpha)
    lhs = morrey_norm_dyadic(J, (tup.s, tup.t))
    g1 = powered_frac(f1, tup.alpha, u)
    g2 = powered_frac(f2, tup.alpha, conjugate(u))
    rhs = morrey_norm_dyadic(g1, (heyan.s1, heyan.t1)) * morrey_norm_dyadic(g2, (heyan.s2, heyan.t2))
    if rhs == 0.0:
        ratio = 0.0 if lhs == 0.0 else math.inf
    else:
        ratio = lhs / rhs
    params = {**tup.inputs(), "s": tup.s, "t": tup.t, "u": u}
    return CheckReport("holder-route", params, ratio, 1.0, _judge(ratio, 1.0, REL),
                       f1.extent, f1.gen, seed, {"lhs": lhs, "rhs": rhs})


def report_dict(r: CheckReport) -> dict:
    return asdict(r)
