"""Verification suites, exponent sweeps and the extremizer search.

Every suite draws its inputs from ``(seed, trial)`` alone, so a report line
can be regenerated in isolation and the stream does not depend on how many
worker threads produced it.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bounds import (
    Block,
    BlockDecomposition,
    CheckReport,
    DegenerateInputError,
    ExponentTuple,
    block_lemma_check,
    derive_exponents,
    split_profile,
    theorem_ratio,
)
from .dyadic import DyadicCube
from .families import (
    FamilySpec,
    atoms_to_grid,
    generate,
    lacunary_atoms,
    random_atoms,
    random_pair,
)
from .grid import GridFunction, dilate, morrey_norm_dyadic, morrey_norm_general
from .operators import (
    bilinear_grafakos,
    conjugate,
    dyadic_majorant,
    local_average_all,
    powered_frac,
)

__all__ = [
    "DEFAULT_INPUTS",
    "LEMMAS",
    "SuiteConfig",
    "SweepConfig",
    "SearchResult",
    "suite_pair",
    "run_suite",
    "refinement_report",
    "sweep",
    "search",
    "theorem_members",
    "half_indicator_decomposition",
    "nested_indicator_decomposition",
    "measure_domination",
    "measure_holder",
    "measure_split",
    "measure_local_average",
    "measure_norm_equivalence",
    "measure_dilation",
    "thread_count",
]

DEFAULT_INPUTS = dict(n=1, alpha=0.4, p1=1.8, q1=1.6, p2=1.8, q2=1.6)

# random suite: sparse lacunary atoms with generations in [JMIN, JMAX]
JMIN, JMAX, SPARSITY = -1, 3, 4

DOMINATION_EPS = 0.05
HOLDER_TOL = 1e-12
HOLDER_POWERS = (1.5, 2.0, 3.0)
FROZEN_TOL = 0.10  # allowed growth of a frozen constant under refinement
SPLIT_SCALES = tuple(2.0**k for k in range(-8, 5))
AVERAGE_GENS = (-2, -1, 0, 1, 2)
NORM_EQ_BOUND = 4.0
# (p, q) pairs for the norm comparison; q >= 1 throughout
NORM_EQ_EXPONENTS = ((2.0, 1.5), (1.8, 1.6), (3.0, 1.0), (4.0, 2.0), (1.5, 1.5))
BLOCK_EXPONENTS = (2.0, 1.5, 3.0, 2.0)  # (p, q, s, t)

LEMMAS = (
    "domination",
    "holder-split",
    "block",
    "s1s2",
    "local-average",
    "theorem",
    "norm-equivalence",
)


def thread_count() -> int:
    raw = os.environ.get("MORREYLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _ordered_map(fn, items, threads: int | None = None) -> list:
    threads = thread_count() if threads is None else threads
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def suite_pair(seed: int, trial: int, extent: int, gen: int, n: int = 1):
    """The random pair of the suite for ``(seed, trial)`` on the ``(extent, gen)`` lattice."""
    a1, a2 = random_pair(seed, trial, extent, JMIN, min(JMAX, gen), SPARSITY, n)
    return atoms_to_grid(a1, n, extent, gen), atoms_to_grid(a2, n, extent, gen)


def _safe_ratio(num: np.ndarray, den: np.ndarray) -> float:
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    pos = den > 0
    if np.any(num[~pos] > 0):
        return math.inf
    if not np.any(pos):
        return 0.0
    return float(np.max(num[pos] / den[pos]))


# ---------------------------------------------------------------------------
# measurements


def measure_domination(f1, f2, alpha: float) -> float:
    """``max_x J(x) / majorant(x)``."""
    J = bilinear_grafakos(f1, f2, alpha).values
    D = dyadic_majorant(f1, f2, alpha).values
    return _safe_ratio(J, D)


def measure_holder(f1, f2, alpha: float, powers=HOLDER_POWERS) -> float:
    """``max_{u, x} J(x) / (I^(u) f1(x) I^(u') f2(x))``."""
    J = bilinear_grafakos(f1, f2, alpha).values
    worst = 0.0
    for u in powers:
        g = powered_frac(f1, alpha, u).values * powered_frac(f2, alpha, conjugate(u)).values
        worst = max(worst, _safe_ratio(J, g))
    return worst


@dataclass(frozen=True)
class SplitMeasure:
    c1: float  # max S1 / (L^alpha Mf1 Mf2)
    c2: float  # max S2 / (L^{-n/s} ||f1|| ||f2||)
    partition_error: float  # max |S1 + S2 - sigma| / sigma
    balance_error: float  # max |bound1 / bound2 - 1| at the optimal scale
    opt1: float  # S1 / bound1 at the optimal scale
    opt2: float
    c_opt: float  # max sigma / ((Mf1 Mf2)^{p/s} (norm product)^{1-p/s})


def measure_split(f1, f2, tup: ExponentTuple, scales=SPLIT_SCALES) -> SplitMeasure:
    prof = split_profile(f1, f2, tup.alpha, tup)
    sigma = prof.sigma
    mm = prof.mf1 * prof.mf2
    nn = prof.norm1 * prof.norm2
    c1 = c2 = err = 0.0
    for L in scales:
        s1, s2 = prof.split_all(L)
        c1 = max(c1, _safe_ratio(s1, L**tup.alpha * mm))
        c2 = max(c2, _safe_ratio(s2, np.full_like(s2, L ** (-tup.n / tup.s) * nn)))
        gap = np.abs(s1 + s2 - sigma)
        err = max(err, _safe_ratio(gap, sigma))
    if nn == 0.0 or not np.all(mm > 0):
        raise DegenerateInputError("the optimal scale needs Mf1 Mf2 > 0 and nonzero norms")
    Lopt = (nn / mm) ** (tup.p / tup.n)
    s1, s2 = prof.split_all(Lopt)
    b1 = Lopt**tup.alpha * mm
    b2 = Lopt ** (-tup.n / tup.s) * nn
    balance = float(np.max(np.abs(b1 / b2 - 1.0)))
    balanced = mm ** (tup.p / tup.s) * nn ** (1.0 - tup.p / tup.s)
    return SplitMeasure(c1, c2, err, balance, _safe_ratio(s1, b1), _safe_ratio(s2, b2),
                        _safe_ratio(sigma, balanced))


def measure_local_average(f1, f2, v: float, gens=AVERAGE_GENS) -> float:
    worst = 0.0
    for l in gens:
        if l < -f1.extent or l > f1.gen:
            continue
        lhs, rhs = local_average_all(f1, f2, l, v)
        worst = max(worst, _safe_ratio(lhs, rhs))
    return worst


def measure_norm_equivalence(f: GridFunction, exponents=NORM_EQ_EXPONENTS) -> tuple[float, float]:
    """``(min, max)`` of general / dyadic Morrey norm over ``exponents``."""
    lo, hi = math.inf, 0.0
    for pq in exponents:
        d = morrey_norm_dyadic(f, pq)
        g = morrey_norm_general(f, pq)
        if d == 0.0:
            continue
        lo, hi = min(lo, g / d), max(hi, g / d)
    return lo, hi


def measure_dilation(f1, f2, tup: ExponentTuple, m: int) -> tuple[float, float]:
    """Relative errors of the Morrey dilation law and of theorem-ratio invariance."""
    g1, g2 = dilate(f1, m), dilate(f2, m)
    expect = 2.0 ** (-m * tup.n / tup.p1) * morrey_norm_dyadic(f1, (tup.p1, tup.q1))
    law = abs(morrey_norm_dyadic(g1, (tup.p1, tup.q1)) - expect) / expect
    r0 = theorem_ratio(f1, f2, tup).ratio
    r1 = theorem_ratio(g1, g2, tup).ratio
    return law, abs(r1 - r0) / r0


# ---------------------------------------------------------------------------
# block decompositions


def nested_indicator_decomposition(extent: int, gen: int, top: int = -1, depth: int = 5) -> BlockDecomposition:
    """``a_j = chi_{Q_j}`` on the tower ``Q_j = [0, 2^-j)``."""
    blocks = []
    for j in range(top, top + depth):
        cube = DyadicCube(j, (0,))
        a = atoms_to_grid([(j, (0,), 1.0)], 1, extent, gen)
        blocks.append(Block(cube, a, 2.0**-j))
    return BlockDecomposition(tuple(blocks))


def half_indicator_decomposition(extent: int, gen: int, top: int = -1, depth: int = 5) -> BlockDecomposition:
    """``a_j`` = indicator of the left half of ``Q_j = [0, 2^-j)``, ``lam_j = 2^-j``."""
    blocks = []
    for j in range(top, top + depth):
        cube = DyadicCube(j, (0,))
        a = atoms_to_grid([(j + 1, (0,), 1.0)], 1, extent, gen)
        blocks.append(Block(cube, a, 2.0**-j))
    return BlockDecomposition(tuple(blocks))


def random_decomposition(seed: int, trial: int, extent: int, gen: int) -> BlockDecomposition:
    """One to four blocks, each a sparse atom sum inside a random dyadic cube."""
    rng = np.random.default_rng([seed, trial, 2])
    blocks = []
    for _ in range(int(rng.integers(1, 5))):
        j = int(rng.integers(-extent, min(JMAX, gen - 1) + 1))
        k = int(rng.integers(-(2 ** (extent + j)), 2 ** (extent + j)))
        atoms = []
        for _ in range(int(rng.integers(1, 4))):
            jj = int(rng.integers(j, min(j + 3, gen) + 1))
            span = 2 ** (jj - j)
            kk = k * span + int(rng.integers(0, span))
            atoms.append((jj, (kk,), float(np.exp(rng.normal(0.0, 0.75)))))
        a = atoms_to_grid(atoms, 1, extent, gen)
        blocks.append(Block(DyadicCube(j, (k,)), a, float(np.exp(rng.normal(0.0, 1.0)))))
    return BlockDecomposition(tuple(blocks))


# ---------------------------------------------------------------------------
# theorem sweep members


def theorem_members(tup: ExponentTuple, seed: int, count: int) -> list[tuple[str, FamilySpec, FamilySpec]]:
    """Structured extremal candidates first, then seeded random pairs."""
    n = tup.n
    out = []
    unit = tuple((0, (k,) * n, 1.0) for k in (-1, 0)) if n == 1 else ((0, (0,) * n, 1.0),)
    out.append(("indicator", FamilySpec("indicator", atoms=unit, n=n), FamilySpec("indicator", atoms=unit, n=n)))
    crit = n / max(tup.p1, tup.p2)
    for beta in (0.2, 0.4, 0.5, crit):
        spec = FamilySpec("power-profile", beta=beta, n=n)
        out.append((f"power-profile:{beta:.6g}", spec, spec))
    for decay in (0.0, 0.3, crit, 0.7):
        atoms = tuple(lacunary_atoms(-1, 5, decay, n))
        spec = FamilySpec("lacunary-sum", atoms=atoms, n=n)
        out.append((f"lacunary-sum:{decay:.6g}", spec, spec))
    t = 0
    while len(out) < count:
        s1 = FamilySpec("random", seed=int(np.random.SeedSequence([seed, t]).generate_state(1)[0]),
                        jmin=JMIN, jmax=JMAX, sparsity=SPARSITY, n=n)
        s2 = FamilySpec("random", seed=int(np.random.SeedSequence([seed, t, 1]).generate_state(1)[0]),
                        jmin=JMIN, jmax=JMAX, sparsity=SPARSITY, n=n)
        out.append((f"random:{t}", s1, s2))
        t += 1
    return out[:count]


# ---------------------------------------------------------------------------
# suites


@dataclass(frozen=True)
class SuiteConfig:
    tup: ExponentTuple
    extent: int = 2
    levels: tuple[int, ...] = (6,)
    seed: int = 42
    trials: int = 100
    constants: dict = field(default_factory=dict)


def _params(tup: ExponentTuple, **extra) -> dict:
    d = {**tup.inputs(), "s": tup.s, "t": tup.t}
    d.update(extra)
    return d


def _frozen(cfg: SuiteConfig, name: str) -> float:
    if name in cfg.constants:
        return float(cfg.constants[name])
    from .constants import frozen_value

    return frozen_value(name)


def _trial_report(lemma: str, cfg: SuiteConfig, gen: int, trial: int) -> CheckReport:
    tup, E, seed = cfg.tup, cfg.extent, cfg.seed
    if lemma == "theorem":
        members = theorem_members(tup, seed, cfg.trials)
        name, s1, s2 = members[trial]
        C = _frozen(cfg, "C_thm")
        rep = theorem_ratio(generate(s1, E, gen), generate(s2, E, gen), tup, seed=seed,
                            constant=C, tol=FROZEN_TOL)
        rep.params["member"] = name
        rep.params["trial"] = trial
        return rep
    if lemma == "block":
        p, q, s, t = BLOCK_EXPONENTS
        d = random_decomposition(seed, trial, E, gen)
        rep = block_lemma_check(d, p, q, s, t, _frozen(cfg, "C_block"), FROZEN_TOL, seed)
        rep.extent, rep.gen = E, gen
        rep.params["trial"] = trial
        return rep
    f1, f2 = suite_pair(seed, trial, E, gen, tup.n)
    a = tup.alpha
    if lemma == "domination":
        C = 2.0 ** (tup.n - a) * (1.0 + DOMINATION_EPS)
        ratio = measure_domination(f1, f2, a)
        passed = ratio <= C
        params = _params(tup, trial=trial)
    elif lemma == "holder-split":
        C = 1.0
        ratio = measure_holder(f1, f2, a)
        passed = ratio <= C * (1.0 + HOLDER_TOL)
        params = _params(tup, trial=trial, u=list(HOLDER_POWERS))
    elif lemma == "s1s2":
        m = measure_split(f1, f2, tup)
        C1, C2 = _frozen(cfg, "C1"), _frozen(cfg, "C2")
        # normalized: each measured constant over its frozen value
        ratio = max(m.c1 / C1, m.c2 / C2, m.opt1 / C1, m.opt2 / C2)
        C = 1.0
        passed = ratio <= 1.0 + FROZEN_TOL and m.partition_error <= 1e-12 and m.balance_error <= 1e-12
        params = _params(tup, trial=trial, c1=m.c1, c2=m.c2, partition_error=m.partition_error,
                         balance_error=m.balance_error, c_opt=m.c_opt)
    elif lemma == "local-average":
        C = _frozen(cfg, "C_avg")
        ratio = measure_local_average(f1, f2, tup.v)
        passed = ratio <= C * (1.0 + FROZEN_TOL)
        params = _params(tup, trial=trial, v=tup.v)
    elif lemma == "norm-equivalence":
        C = NORM_EQ_BOUND
        lo, ratio = measure_norm_equivalence(f1)
        passed = lo >= 1.0 and ratio <= C
        params = {"trial": trial, "exponents": [list(pq) for pq in NORM_EQ_EXPONENTS], "min_ratio": lo}
    else:
        raise ValueError(f"unknown lemma {lemma!r}; choose from {', '.join(LEMMAS)}")
    return CheckReport(lemma, params, float(ratio), float(C), bool(passed), E, gen, seed)


def run_suite(lemma: str, cfg: SuiteConfig, threads: int | None = None) -> list[CheckReport]:
    """One report per (level, trial), ordered by level then trial."""
    if lemma not in LEMMAS:
        raise ValueError(f"unknown lemma {lemma!r}; choose from {', '.join(LEMMAS)}")
    if lemma in ("s1s2", "local-average", "theorem") and not cfg.tup.admissible:
        raise ValueError(f"tuple not admissible: {cfg.tup.reason}")
    jobs = [(g, t) for g in cfg.levels for t in range(cfg.trials)]
    return _ordered_map(lambda job: _trial_report(lemma, cfg, *job), jobs, threads)


def refinement_report(reports: list[CheckReport], tol: float = FROZEN_TOL) -> CheckReport | None:
    """Compare the max ratio of the two finest levels in ``reports``."""
    levels = sorted({r.gen for r in reports})
    if len(levels) < 2:
        return None
    best = {g: max(r.ratio for r in reports if r.gen == g) for g in levels}
    lo, hi = best[levels[-2]], best[levels[-1]]
    change = abs(hi - lo) / lo if lo > 0 else math.inf
    ref = reports[0]
    params = {**ref.params, "levels": levels[-2:], "max_ratio": [lo, hi]}
    params.pop("trial", None)
    params.pop("member", None)
    return CheckReport(f"{ref.check}-refinement", params, change, tol, bool(change <= tol),
                       ref.extent, levels[-1], ref.seed)


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepConfig:
    inputs: tuple[dict, ...]  # exponent inputs, one dict per tuple
    families: tuple[str, ...]
    levels: tuple[int, ...]
    extent: int = 2
    seed: int = 42
    trials: int = 8


def expand_inputs(n: int, alphas, p1s, q1s, p2s, q2s) -> tuple[dict, ...]:
    return tuple(
        dict(n=n, alpha=a, p1=p1, q1=q1, p2=p2, q2=q2)
        for a, p1, q1, p2, q2 in itertools.product(alphas, p1s, q1s, p2s, q2s)
    )


def _family_members(kind: str, tup: ExponentTuple, seed: int, count: int):
    members = theorem_members(tup, seed, max(count, 9) + 16)
    if kind == "all":
        return members[:count]
    picked = [m for m in members if m[1].kind == kind]
    return picked[:count]


def sweep(cfg: SweepConfig, threads: int | None = None) -> list[CheckReport]:
    """Theorem ratios over tuples x family members x levels.

    Inadmissible tuples with a finite target exponent are kept as report-only
    probes (``pass`` is null); tuples without one are skipped.
    """
    jobs = []
    for inp in cfg.inputs:
        tup = derive_exponents(**inp)
        if tup.s is None:
            continue
        for fam in cfg.families:
            for name, s1, s2 in _family_members(fam, tup, cfg.seed, cfg.trials):
                for g in cfg.levels:
                    jobs.append((tup, name, s1, s2, g))

    def run(job):
        tup, name, s1, s2, g = job
        rep = theorem_ratio(generate(s1, cfg.extent, g), generate(s2, cfg.extent, g), tup, seed=cfg.seed)
        rep.params["member"] = name
        if not tup.admissible:
            rep.check = "theorem-probe"
            rep.passed = None
        return rep

    return _ordered_map(run, jobs, threads)


# ---------------------------------------------------------------------------
# extremizer search


@dataclass(frozen=True)
class _Space:
    """Integer box ``lo <= x <= hi`` plus a decoder to a pair of functions."""

    lo: tuple[int, ...]
    hi: tuple[int, ...]
    build: object

    def sample(self, rng) -> tuple[int, ...]:
        return tuple(int(rng.integers(a, b + 1)) for a, b in zip(self.lo, self.hi))

    def neighbor(self, x, rng) -> tuple[int, ...]:
        i = int(rng.integers(len(x)))
        span = self.hi[i] - self.lo[i]
        step = int(rng.integers(1, max(1, span // 8) + 1)) * (1 if rng.random() < 0.5 else -1)
        y = list(x)
        y[i] = min(self.hi[i], max(self.lo[i], y[i] + step))
        return tuple(y)


def _lacunary_space(n, E, G) -> _Space:
    # per function: top generation, tower depth, decay index, anchor
    def build(x):
        fs = []
        for j0, depth, d, anchor in (x[:4], x[4:]):
            depth = min(depth, G - j0 + 1)
            atoms = lacunary_atoms(j0, depth, -1.0 + 0.1 * d, n, anchor)
            fs.append(atoms_to_grid(atoms, n, E, G))
        return fs

    lo = (-E, 1, 0, -1) * 2
    hi = (G, 6, 20, 0) * 2
    return _Space(lo, hi, build)


def _power_space(n, E, G) -> _Space:
    def build(x):
        return [generate(FamilySpec("power-profile", beta=b / 20.0, n=n), E, G) for b in x]

    return _Space((0, 0), (19, 19), build)


def _indicator_space(n, E, G) -> _Space:
    cells = 2 ** (E + 1 + G)

    def build(x):
        fs = []
        for j, c in (x[:2], x[2:]):
            k = (c - 2 ** (E + G)) // 2 ** (G - j)
            fs.append(atoms_to_grid([(j, (k,) * n, 1.0)], n, E, G))
        return fs

    return _Space((-E, 0) * 2, (G, cells - 1) * 2, build)


def _random_space(n, E, G) -> _Space:
    def build(x):
        return [
            atoms_to_grid(random_atoms(np.random.default_rng(s), n, E, JMIN, min(JMAX, G), SPARSITY), n, E, G)
            for s in x
        ]

    return _Space((0, 0), (2**20, 2**20), build)


SEARCH_FAMILIES = {
    "lacunary-sum": _lacunary_space,
    "power-profile": _power_space,
    "indicator": _indicator_space,
    "random": _random_space,
}


@dataclass(frozen=True)
class SearchResult:
    trace: tuple[tuple[int, float, float], ...]  # (iteration, evaluated ratio, best so far)
    best: float
    best_point: tuple[int, ...]


def search(tup: ExponentTuple, family: str, iters: int, seed: int, extent: int = 2, gen: int = 6,
           restart: int = 25) -> SearchResult:
    """Random-restart hill climbing on the theorem ratio.

    The best value is attained by an explicit pair, so it is a lower bound for
    the discrete operator-norm constant at this grid.
    """
    if not tup.admissible:
        raise ValueError(f"tuple not admissible: {tup.reason}")
    if family not in SEARCH_FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(SEARCH_FAMILIES)}")
    if iters < 0:
        raise ValueError("iterations must be >= 0")
    space = SEARCH_FAMILIES[family](tup.n, extent, gen)
    rng = np.random.default_rng(seed)

    def value(x) -> float:
        f1, f2 = space.build(x)
        try:
            return theorem_ratio(f1, f2, tup).ratio
        except DegenerateInputError:
            return -math.inf

    cur = space.sample(rng)
    cur_val = value(cur)
    best, best_x = cur_val, cur
    trace = [(0, cur_val, best)]
    for it in range(1, iters + 1):
        if it % restart == 0:
            cand = space.sample(rng)
            val = value(cand)
            cur, cur_val = cand, val
        else:
            cand = space.neighbor(cur, rng)
            val = value(cand)
            if val >= cur_val:
                cur, cur_val = cand, val
        if val > best:
            best, best_x = val, cand
        trace.append((it, val, best))
    if not math.isfinite(best):
        raise DegenerateInputError("every evaluated pair was degenerate")
    return SearchResult(tuple(trace), best, best_x)
