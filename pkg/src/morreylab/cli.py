"""Command-line front end.

Exit status: 0 when every check passes, 1 when at least one fails, 2 on bad
input or usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import experiments as ex
from .bounds import DegenerateInputError, InapplicableError, derive_exponents
from .families import FAMILY_KINDS, FamilySpec, generate
from .grid import (
    GridError,
    constant,
    indicator,
    load_function,
    morrey_norm_dyadic,
    morrey_norm_general,
    power_profile,
    save_function,
)
from .dyadic import Region
from .operators import (
    bilinear_grafakos,
    bilinear_ks,
    bilinear_grafakos_at,
    dyadic_majorant,
    dyadic_majorant_at,
    frac_integral,
    frac_integral_at,
    powered_frac,
    surrogate_sigma,
)
from .grid import hl_maximal, powered_maximal
from .oracle import ORACLES, run_oracle
from .report import to_jsonl, write_reports

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# name -> (arity, needs alpha, needs u, evaluator)
OPERATORS = {
    "ialpha": (1, True, False, lambda fs, a, u: frac_integral(fs[0], a)),
    "ialpha-pow": (1, True, True, lambda fs, a, u: powered_frac(fs[0], a, u)),
    "jalpha": (2, True, False, lambda fs, a, u: bilinear_grafakos(fs[0], fs[1], a)),
    "ks": (2, True, False, lambda fs, a, u: bilinear_ks(fs[0], fs[1], a)),
    "majorant": (2, True, False, lambda fs, a, u: dyadic_majorant(fs[0], fs[1], a)),
    "sigma": (2, True, False, lambda fs, a, u: surrogate_sigma(fs[0], fs[1], a)),
    "maximal": (1, False, False, lambda fs, a, u: hl_maximal(fs[0])),
    "maximal-pow": (1, False, True, lambda fs, a, u: powered_maximal(fs[0], u)),
}

POINT_EVALUATORS = {
    "ialpha": lambda fs, a, x: frac_integral_at(fs[0], a, x),
    "jalpha": lambda fs, a, x: bilinear_grafakos_at(fs[0], fs[1], a, x),
    "majorant": lambda fs, a, x: dyadic_majorant_at(fs[0], fs[1], a, x),
}


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_grid(p):
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--extent", type=int, default=2)
    p.add_argument("--gen", type=int, default=6)


def _add_tuple(p, lists: bool = False):
    kind = _floats if lists else float
    d = ex.DEFAULT_INPUTS
    for name in ("alpha", "p1", "q1", "p2", "q2"):
        default = [d[name]] if lists else d[name]
        p.add_argument(f"--{name}", type=kind, default=default)


def _add_output(p):
    p.add_argument("--out", type=Path, help="report file (.csv for CSV, otherwise JSON lines)")
    p.add_argument("--plot", action="store_true", help="also write a PNG figure next to --out")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="morreylab", description="Morrey-space bilinear fractional integral workbench")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", help="Morrey norm of a function file")
    p.add_argument("file", type=Path)
    p.add_argument("--p", "--p1", dest="p", type=float, required=True)
    p.add_argument("--q", "--q1", dest="q", type=float, required=True)
    p.add_argument("--general", action="store_true", help="sup over all cubes instead of dyadic cubes")

    for name, help_ in (("apply", "apply an operator"), ("oracle", "brute-force reference evaluation")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("op", choices=sorted(OPERATORS if name == "apply" else ORACLES))
        p.add_argument("files", type=Path, nargs="+")
        p.add_argument("--alpha", type=float)
        p.add_argument("--u", type=float)
        p.add_argument("--out", type=Path)
        p.add_argument("--plot", action="store_true")
        if name == "apply":
            p.add_argument("--at", type=float, help="print the exact value at this point (1D)")

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--lemma", required=True, choices=ex.LEMMAS)
    _add_tuple(p)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--extent", type=int, default=2)
    p.add_argument("--levels", type=_ints)
    p.add_argument("--gen", type=int, default=6)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--trials", type=int, default=100)
    _add_output(p)

    p = sub.add_parser("sweep", help="theorem ratios over exponent tuples and families")
    _add_tuple(p, lists=True)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--extent", type=int, default=2)
    p.add_argument("--levels", type=_ints, default=[5, 6])
    p.add_argument("--family", default="all",
                   help="comma list of indicator, lacunary-sum, power-profile, random, or all")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--trials", type=int, default=8, help="members per family")
    _add_output(p)

    p = sub.add_parser("search", help="hill-climb the theorem ratio for a lower bound")
    _add_tuple(p)
    _add_grid(p)
    p.add_argument("--family", default="lacunary-sum", choices=sorted(ex.SEARCH_FAMILIES))
    p.add_argument("--iters", type=int, default=200)
    p.add_argument("--seed", type=int, default=7)
    _add_output(p)

    p = sub.add_parser("make", help="write a function file")
    p.add_argument("kind", choices=("indicator", "constant", "power-profile", "random"))
    _add_grid(p)
    p.add_argument("--lo", type=Fraction, default=Fraction(0))
    p.add_argument("--hi", type=Fraction, default=Fraction(1))
    p.add_argument("--value", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)
    return top


# ---------------------------------------------------------------------------
# commands


def cmd_norm(a) -> int:
    f = load_function(a.file)
    fn = morrey_norm_general if a.general else morrey_norm_dyadic
    print(f"{fn(f, (a.p, a.q)):.12f}")
    return EXIT_OK


def _operands(a, arity: int, needs_alpha: bool, needs_u: bool):
    if len(a.files) != arity:
        raise UsageError(f"{a.op} takes {arity} input file(s), got {len(a.files)}")
    if needs_alpha and a.alpha is None:
        raise UsageError(f"{a.op} needs --alpha")
    if needs_u and a.u is None:
        raise UsageError(f"{a.op} needs --u")
    return [load_function(p) for p in a.files]


def _emit_field(g, a) -> None:
    if a.out is None:
        print(json.dumps(g.to_dict()))
    else:
        save_function(g, a.out)
    if a.plot:
        from .plotting import plot_field

        target = a.out.with_suffix(".png") if a.out else Path(f"{a.command}-{a.op}.png")
        plot_field(g, target, f"{a.op}")


def cmd_apply(a) -> int:
    arity, needs_alpha, needs_u, fn = OPERATORS[a.op]
    fs = _operands(a, arity, needs_alpha, needs_u)
    if a.at is not None:
        if a.op not in POINT_EVALUATORS:
            raise UsageError(f"--at is available for {', '.join(sorted(POINT_EVALUATORS))}")
        print(f"{POINT_EVALUATORS[a.op](fs, a.alpha, a.at):.12f}")
        return EXIT_OK
    _emit_field(fn(fs, a.alpha, a.u), a)
    return EXIT_OK


def cmd_oracle(a) -> int:
    kind = ORACLES[a.op][0]
    arity = 2 if kind == "binary" else 1
    fs = _operands(a, arity, kind in ("unary", "unary-u", "binary"), kind.endswith("-u"))
    _emit_field(run_oracle(a.op, fs, a.alpha, a.u), a)
    return EXIT_OK


def _tuple(a):
    return derive_exponents(a.dim, a.alpha, a.p1, a.q1, a.p2, a.q2)


def _finish(reports, a, title: str) -> int:
    sys.stdout.write(to_jsonl(reports))
    if a.out is not None:
        write_reports(reports, a.out)
        if a.plot:
            from .plotting import plot_reports

            plot_reports(reports, a.out.with_suffix(".png"), title)
    elif a.plot:
        raise UsageError("--plot needs --out")
    failed = [r for r in reports if r.passed is False]
    print(f"{len(reports) - len(failed)}/{len(reports)} passed", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_verify(a) -> int:
    tup = _tuple(a)
    levels = tuple(a.levels or [a.gen])
    if a.trials < 1:
        raise UsageError("--trials must be positive")
    cfg = ex.SuiteConfig(tup, a.extent, levels, a.seed, a.trials)
    reports = ex.run_suite(a.lemma, cfg)
    if a.lemma == "theorem":
        ref = ex.refinement_report(reports)
        if ref is not None:
            reports.append(ref)
    return _finish(reports, a, f"verify {a.lemma}")


def cmd_sweep(a) -> int:
    fams = [s.strip() for s in a.family.split(",") if s.strip()]
    bad = [f for f in fams if f not in ("all",) + FAMILY_KINDS]
    if bad:
        raise UsageError(f"unknown family {bad[0]!r}")
    inputs = ex.expand_inputs(a.dim, a.alpha, a.p1, a.q1, a.p2, a.q2)
    cfg = ex.SweepConfig(inputs, tuple(fams), tuple(a.levels), a.extent, a.seed, a.trials)
    return _finish(ex.sweep(cfg), a, "sweep")


def cmd_search(a) -> int:
    tup = _tuple(a)
    res = ex.search(tup, a.family, a.iters, a.seed, a.extent, a.gen)
    lines = ["iter,ratio,best"] + [f"{i},{r!r},{b!r}" for i, r, b in res.trace]
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if a.out is not None:
        a.out.write_text(text)
        if a.plot:
            from .plotting import plot_trace

            plot_trace(res.trace, a.out.with_suffix(".png"), f"search {a.family}")
    elif a.plot:
        raise UsageError("--plot needs --out")
    print(f"best ratio {res.best!r} at {list(res.best_point)}", file=sys.stderr)
    return EXIT_OK


def cmd_make(a) -> int:
    if a.kind == "indicator":
        f = indicator(Region.cube(a.lo, a.hi, a.dim), a.gen, a.extent)
    elif a.kind == "constant":
        f = constant(a.value, a.gen, a.extent, a.dim)
    elif a.kind == "power-profile":
        f = power_profile(a.beta, a.gen, a.extent, a.dim)
    else:
        f = generate(FamilySpec("random", seed=a.seed, jmax=min(4, a.gen), n=a.dim), a.extent, a.gen)
    save_function(f, a.out)
    return EXIT_OK


COMMANDS = {
    "norm": cmd_norm,
    "apply": cmd_apply,
    "oracle": cmd_oracle,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "search": cmd_search,
    "make": cmd_make,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, GridError, InapplicableError, DegenerateInputError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
