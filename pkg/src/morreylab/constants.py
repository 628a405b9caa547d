"""Frozen empirical constants.

Each constant is the largest ratio seen on a coarse grid over a seeded suite.
The values ship as ``data/frozen_constants.json``, together with the grid and
seed that produced them, and checks on finer grids compare against them.
Run ``python -m morreylab.constants`` to measure them again.
"""

from __future__ import annotations

import json
import sys
from dataclasses import asdict, dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

__all__ = ["FrozenConstant", "frozen", "frozen_value", "measure_all", "write_constants"]

DATA = "frozen_constants.json"


@dataclass(frozen=True)
class FrozenConstant:
    name: str
    value: float
    check: str
    extent: int
    gen: int
    seed: int
    trials: int
    params: dict


@lru_cache(maxsize=1)
def frozen() -> dict[str, FrozenConstant]:
    text = resources.files("morreylab").joinpath("data").joinpath(DATA).read_text()
    raw = json.loads(text)
    return {k: FrozenConstant(name=k, **v) for k, v in raw.items()}


def frozen_value(name: str) -> float:
    try:
        return frozen()[name].value
    except KeyError:
        raise KeyError(f"no frozen constant named {name!r}") from None


def measure_all(seed: int = 42, trials: int = 100, extent: int = 2) -> dict[str, FrozenConstant]:
    """Measure every constant at its freezing level."""
    from . import experiments as ex
    from .bounds import block_lemma_check, derive_exponents

    tup = derive_exponents(**ex.DEFAULT_INPUTS)
    base = tup.inputs()
    out = {}

    def put(name, value, check, gen, params=base, n_trials=trials):
        out[name] = FrozenConstant(name, float(value), check, extent, gen, seed, n_trials, dict(params))

    g = 4
    splits = [ex.measure_split(*ex.suite_pair(seed, t, extent, g), tup) for t in range(trials)]
    put("C1", max(max(m.c1, m.opt1) for m in splits), "s1s2", g)
    put("C2", max(max(m.c2, m.opt2) for m in splits), "s1s2", g)
    put("C_opt", max(m.c_opt for m in splits), "s1s2", g)

    g = 5
    put("C_avg", max(ex.measure_local_average(*ex.suite_pair(seed, t, extent, g), tup.v)
                     for t in range(trials)), "local-average", g, {**base, "v": tup.v})

    g = 4
    p, q, s, t_ = ex.BLOCK_EXPONENTS
    bparams = dict(p=p, q=q, s=s, t=t_)
    put("C_block", max(block_lemma_check(ex.random_decomposition(seed, t, extent, g), p, q, s, t_).ratio
                       for t in range(trials)), "block", g, bparams)
    half = block_lemma_check(ex.half_indicator_decomposition(extent, g), p, q, s, t_)
    put("block_half", half.ratio, "block", g, bparams, 1)

    put("C_eq", max(ex.measure_norm_equivalence(ex.suite_pair(seed, t, extent, g)[0])[1]
                    for t in range(trials)), "norm-equivalence", g,
        {"exponents": [list(e) for e in ex.NORM_EQ_EXPONENTS]})

    g = 5
    cfg = ex.SuiteConfig(tup, extent, (g,), seed, trials, constants={"C_thm": float("inf")})
    put("C_thm", max(r.ratio for r in ex.run_suite("theorem", cfg)), "theorem", g)
    return out


def write_constants(consts: dict[str, FrozenConstant], path) -> None:
    body = {k: {kk: vv for kk, vv in asdict(c).items() if kk != "name"} for k, c in consts.items()}
    Path(path).write_text(json.dumps(body, indent=2, sort_keys=True) + "\n")


def _default_path() -> Path:
    return Path(__file__).with_name("data") / DATA


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else _default_path()
    target.parent.mkdir(parents=True, exist_ok=True)
    write_constants(measure_all(), target)
    print(target.read_text(), end="")
