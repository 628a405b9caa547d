import json
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from morreylab.dyadic import Region, cubes_of_generation
from morreylab.grid import (
    AlignmentError,
    DomainError,
    GridError,
    GridFunction,
    MorreyParams,
    constant,
    dilate,
    embed,
    hl_maximal,
    indicator,
    load_function,
    lq_norm_on,
    morrey_norm_dyadic,
    morrey_norm_general,
    power_profile,
    powered_maximal,
    save_function,
)
from morreylab.oracle import oracle_maximal, oracle_maximal_pow

from conftest import grid_functions

pq_pairs = st.tuples(st.floats(1.0, 4.0), st.floats(0.5, 1.0)).map(lambda t: (t[0], t[0] * t[1]))


def unit(gen=4, extent=2):
    return indicator(Region.interval(0, 1), gen, extent)


def brute_dyadic_norm(f, p, q, extra=3):
    """Sup over every dyadic cube meeting the domain, far beyond the window."""
    best = 0.0
    for j in range(-f.extent - extra, f.gen + extra + 1):
        for cube in cubes_of_generation(j, f.domain):
            side = float(cube.side)
            if j <= f.gen:
                lq = lq_norm_on(f, q, cube.region)
            else:
                x = float(cube.region.lo[0])
                lq = f.value_at(x) * side ** (1.0 / q)
            best = max(best, side ** (1.0 / p - 1.0 / q) * lq)
    return best


def brute_general_norm(f, p, q):
    vals = f.values
    best = 0.0
    for a in range(f.cells):
        for b in range(a + 1, f.cells + 1):
            side = (b - a) * f.h
            lq = (np.sum(vals[a:b] ** q) * f.h) ** (1.0 / q)
            best = max(best, side ** (1.0 / p - 1.0 / q) * lq)
    return best


# ---------------------------------------------------------------------------
# representation


def test_indicator_examples():
    f = indicator(Region.interval(0, 1), 2, 1)
    assert f.cells == 16 and f.values.sum() == 4
    g = indicator(Region.interval(-1, 1), 1, 1)
    assert g.cells == 8 and g.values.sum() == 4
    with pytest.raises(AlignmentError):
        indicator(Region.interval(0, 0.3), 2, 1)
    with pytest.raises(ValueError):
        Region.interval(0, F(3, 10))


def test_indicator_outside_domain():
    with pytest.raises(DomainError):
        indicator(Region.interval(0, 4), 2, 1)


def test_grid_validation():
    with pytest.raises(GridError):
        GridFunction(1, 0, 0, [1.0, -1.0])
    with pytest.raises(GridError):
        GridFunction(1, 0, 0, [1.0])
    with pytest.raises(GridError):
        GridFunction(1, 0, 0, [1.0, math.nan])
    f = GridFunction(1, 0, 0, [1.0, 2.0])
    with pytest.raises(ValueError):
        f.values[0] = 3.0


def test_file_roundtrip(tmp_path):
    f = power_profile(0.5, 3, 1)
    path = tmp_path / "f.json"
    save_function(f, path)
    g = load_function(path)
    assert g.same_lattice(f)
    assert np.array_equal(g.values, f.values)
    assert set(json.loads(path.read_text())) == {"dim", "extent", "gen", "values"}


def test_file_missing_field(tmp_path):
    path = tmp_path / "f.json"
    path.write_text(json.dumps({"dim": 1, "extent": 0, "values": [0, 0]}))
    with pytest.raises(GridError):
        load_function(path)


def test_power_profile_examples():
    f = power_profile(0.5, 2, 1)
    assert f.value_at(1.0) == pytest.approx((1.25**0.5 - 1) / (0.5 * 0.25), rel=1e-12)
    assert f.value_at(1.0) == pytest.approx(0.94427, abs=1e-5)
    assert f.value_at(0.0) == pytest.approx(4.0, rel=1e-12)
    assert f.value_at(-0.1) == pytest.approx(4.0, rel=1e-12)
    with pytest.raises(ValueError):
        power_profile(1.0, 2, 1)


def test_power_profile_2d_mass():
    # total mass over [-1,1)^2 of |x|^-1/2, by polar integration of the square
    f = power_profile(0.5, 3, 0, n=2)
    mass = f.values.sum() * f.cell_volume
    ang = sum(math.cos(t) ** (-1.5) for t in (np.arange(20000) + 0.5) * (math.pi / 4) / 20000) * (math.pi / 4) / 20000
    exact = 8 * ang / 1.5
    assert mass == pytest.approx(exact, rel=1e-3)


# ---------------------------------------------------------------------------
# lattice changes


def test_dilate_examples():
    f = unit()
    g = dilate(f, 1, extent=2, gen=4)
    assert np.array_equal(g.values, indicator(Region.interval(0, 0.5), 4, 2).values)
    g = dilate(f, -1, extent=2, gen=4)
    assert np.array_equal(g.values, indicator(Region.interval(0, 2), 4, 2).values)


def test_embed_refuses_information_loss():
    f = unit(gen=4)
    with pytest.raises(AlignmentError):
        embed(indicator(Region.interval(0, 0.25), 4, 2), 2, 1)
    with pytest.raises(DomainError):
        embed(indicator(Region.interval(-4, -3), 4, 2), 1, 4)
    assert np.array_equal(embed(embed(f, 3, 6), 2, 4).values, f.values)


@given(f=grid_functions(max_gen=3), m=st.integers(-2, 2), pq=pq_pairs)
def test_dilation_law(f, m, pq):
    p, q = pq
    g = dilate(f, m)
    expect = 2.0 ** (-m * f.n / p) * morrey_norm_dyadic(f, pq)
    assert morrey_norm_dyadic(g, pq) == pytest.approx(expect, rel=1e-12, abs=1e-300)


def test_power_profile_scale_fixed_point():
    # |2^m x|^{-1/p} = 2^{-m/p} |x|^{-1/p}: the dilate is the same profile rescaled
    p, q = 2.0, 1.5
    f = power_profile(1 / p, 5, 2)
    for m in (-2, -1, 1, 2):
        g = dilate(f, m)
        direct = power_profile(1 / p, g.gen, g.extent)
        assert np.allclose(direct.values, 2.0 ** (m / p) * g.values, rtol=1e-12)
        assert morrey_norm_dyadic(direct, (p, q)) == pytest.approx(morrey_norm_dyadic(f, (p, q)), rel=1e-12)


# ---------------------------------------------------------------------------
# norms


def test_lq_examples():
    assert lq_norm_on(unit(), 2, Region.interval(0, 2)) == pytest.approx(1.0)
    half = indicator(Region.interval(0, 0.5), 4, 2)
    assert lq_norm_on(half, 2, Region.interval(0, 1)) == pytest.approx(0.5**0.5, rel=1e-12)
    assert lq_norm_on(unit().scaled(2.0), 1, Region.interval(0, 1)) == pytest.approx(2.0)


def test_morrey_examples():
    f = unit()
    assert morrey_norm_dyadic(f, (2, 1.5)) == pytest.approx(1.0, rel=1e-12)
    assert morrey_norm_dyadic(f, (3, 3)) == pytest.approx(1.0, rel=1e-12)
    assert morrey_norm_general(f, (2, 1.5)) == pytest.approx(1.0, rel=1e-12)
    z = constant(0.0, 3, 1)
    assert morrey_norm_dyadic(z, (2, 1)) == 0.0 and morrey_norm_general(z, (2, 1)) == 0.0


def test_general_beats_dyadic_on_straddling_interval():
    f = indicator(Region.interval(0.25, 0.75), 2, 1)
    gen = morrey_norm_general(f, (2, 1))
    assert gen == pytest.approx(0.5 ** (0.5 - 1) * 0.5, rel=1e-12)
    assert gen == pytest.approx(0.70711, abs=1e-5)
    assert morrey_norm_dyadic(f, (2, 1)) < gen


def test_morrey_params_validation():
    with pytest.raises(ValueError):
        MorreyParams(1.0, 2.0)
    with pytest.raises(ValueError):
        morrey_norm_dyadic(unit(), (math.inf, 1.0))


@given(f=grid_functions(max_extent=1, max_gen=2), pq=pq_pairs)
def test_dyadic_norm_matches_wide_brute_force(f, pq):
    p, q = pq
    assert morrey_norm_dyadic(f, pq) == pytest.approx(brute_dyadic_norm(f, p, q), rel=1e-12, abs=1e-300)


@given(f=grid_functions(max_extent=1, max_gen=3), pq=pq_pairs)
def test_general_norm_matches_brute_force(f, pq):
    p, q = pq
    assert morrey_norm_general(f, pq) == pytest.approx(brute_general_norm(f, p, q), rel=1e-12, abs=1e-300)


@given(f=grid_functions(max_gen=3), pq=pq_pairs)
def test_window_widening_changes_nothing(f, pq):
    assert morrey_norm_dyadic(f, pq) == morrey_norm_dyadic(f, pq, slack=4)


@given(f=grid_functions(max_gen=3), pq=pq_pairs)
def test_general_dominates_dyadic_exactly(f, pq):
    assert morrey_norm_general(f, pq) >= morrey_norm_dyadic(f, pq)


@given(f=grid_functions(max_gen=3), c=st.floats(0.0, 100.0), pq=pq_pairs)
def test_norm_homogeneity(f, c, pq):
    assert morrey_norm_dyadic(f.scaled(c), pq) == pytest.approx(c * morrey_norm_dyadic(f, pq), rel=1e-12, abs=1e-300)


# ---------------------------------------------------------------------------
# maximal functions


def test_hl_maximal_examples():
    f = unit(gen=6)
    M = hl_maximal(f)
    assert M.value_at(2.0) == pytest.approx(0.5, abs=f.h)
    assert M.value_at(2.0) == pytest.approx(1 / (2 + f.h), rel=1e-12)
    inside = M.values[f.index_of(0.0)[0] : f.index_of(0.99)[0] + 1]
    assert np.allclose(inside, 1.0, rtol=0, atol=1e-15)
    c = constant(3.0, 3, 1)
    assert np.allclose(hl_maximal(c).values, 3.0, rtol=1e-14)


def test_powered_maximal_examples():
    f = unit(gen=6)
    assert powered_maximal(f, 1.0).value_at(0.5) == pytest.approx(1.0)
    got = powered_maximal(f, 2.0).value_at(2.0)
    assert got == pytest.approx(oracle_maximal_pow(f, 2.0).value_at(2.0), rel=1e-12)
    # the ball centered at 2 + h/2 must reach back to 0
    assert got == pytest.approx(math.sqrt(1 / (4 + f.h)), rel=1e-12)


@given(f=grid_functions(max_gen=3))
def test_hl_maximal_matches_oracle(f):
    assert np.allclose(hl_maximal(f).values, oracle_maximal(f).values, rtol=1e-12, atol=1e-300)


@given(f=grid_functions(max_gen=3), eta=st.floats(1.0, 3.0))
def test_powered_maximal_matches_oracle(f, eta):
    assert np.allclose(powered_maximal(f, eta).values, oracle_maximal_pow(f, eta).values, rtol=1e-12, atol=1e-300)


@given(f=grid_functions(max_gen=3), c=st.floats(0.0, 50.0), eta=st.floats(1.0, 3.0))
def test_powered_maximal_homogeneous(f, c, eta):
    a = powered_maximal(f.scaled(c), eta).values
    b = c * powered_maximal(f, eta).values
    assert np.allclose(a, b, rtol=1e-12, atol=1e-300)


@given(f=grid_functions(max_gen=3))
def test_maximal_dominates_function(f):
    assert np.all(hl_maximal(f).values >= f.values * (1 - 1e-14))


def test_maximal_2d_constant_and_indicator():
    c = constant(2.0, 2, 1, n=2)
    assert np.allclose(hl_maximal(c).values, 2.0, rtol=1e-14)
    f = indicator(Region.cube(0, 1, 2), 2, 1)
    M = hl_maximal(f)
    assert M.value_at((0.5, 0.5)) == pytest.approx(1.0)
    assert np.all(M.values <= 1.0 + 1e-14)


@given(f=grid_functions(max_gen=3))
def test_centered_and_uncentered_maximal_comparable(f):
    # centered cubes are among the aligned cubes; each aligned cube of w cells
    # sits in the centered cube of 2w - 1 cells
    centered = powered_maximal(f, 1.0).values
    uncentered = hl_maximal(f).values
    assert np.all(centered <= uncentered * (1 + 1e-12))
    assert np.all(uncentered <= 2.0 * centered * (1 + 1e-12))
