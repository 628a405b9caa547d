from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from morreylab.dyadic import (
    DyadicCube,
    Region,
    containing_cube,
    cubes_of_generation,
    is_dyadic,
    triple,
)

gens = st.integers(-4, 6)
coords = st.integers(-40, 40)


def test_cube_geometry():
    q = DyadicCube(2, (3,))
    assert q.region == Region.interval(F(3, 4), F(1))
    assert q.side == F(1, 4)
    assert q.volume == F(1, 4)
    q2 = DyadicCube(1, (0, -1))
    assert q2.volume == F(1, 4)
    assert q2.region == Region((F(0), F(-1, 2)), (F(1, 2), F(0)))


@pytest.mark.parametrize(
    "x, j, k, lo, hi",
    [
        (0.3, 1, 0, F(0), F(1, 2)),
        (0.0, 0, 0, F(0), F(1)),
        (-0.3, 2, -2, F(-1, 2), F(-1, 4)),
    ],
)
def test_containing_cube_examples(x, j, k, lo, hi):
    q = containing_cube(x, j)
    assert q == DyadicCube(j, (k,))
    assert q.region == Region.interval(lo, hi)


def test_boundary_goes_right():
    # half-open: a shared endpoint belongs to the right cube only
    assert containing_cube(0.5, 1) == DyadicCube(1, (1,))
    assert not DyadicCube(1, (0,)).contains_point((0.5,))


@pytest.mark.parametrize(
    "q, lo, hi",
    [
        (DyadicCube(0, (0,)), (F(-1),), (F(2),)),
        (DyadicCube(2, (2,)), (F(1, 4),), (F(1),)),
        (DyadicCube(0, (0, 0)), (F(-1), F(-1)), (F(2), F(2))),
    ],
)
def test_triple_examples(q, lo, hi):
    assert triple(q) == Region(lo, hi)


def test_cubes_of_generation_examples():
    unit = Region.interval(0, 1)
    assert cubes_of_generation(1, unit) == [DyadicCube(1, (0,)), DyadicCube(1, (1,))]
    assert len(cubes_of_generation(0, Region.interval(-2, 2))) == 4
    assert cubes_of_generation(-1, unit) == [DyadicCube(-1, (0,))]


def test_cubes_of_generation_2d_lexicographic():
    cubes = cubes_of_generation(1, Region.cube(0, 1, 2))
    assert [c.k for c in cubes] == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_region_validation():
    with pytest.raises(ValueError):
        Region.interval(1, 1)
    with pytest.raises(ValueError):
        Region.interval(0, F(1, 3))
    assert is_dyadic(F(3, 8)) and not is_dyadic(F(1, 6))


def test_child_selector_validation():
    with pytest.raises(ValueError):
        DyadicCube(0, (0,)).child((2,))


@given(j=gens, k=coords, which=st.integers(0, 1))
def test_parent_child_roundtrip(j, k, which):
    q = DyadicCube(j, (k,))
    c = q.child((which,))
    assert c.parent() == q
    assert q.contains_cube(c)
    assert q.parent().contains_cube(q)


@given(j=gens, k1=coords, k2=coords)
def test_children_tile_the_cube(j, k1, k2):
    q = DyadicCube(j, (k1, k2))
    kids = q.children()
    assert len(kids) == 4
    assert sum(c.volume for c in kids) == q.volume
    for a in kids:
        assert q.region.contains_region(a.region)
        for b in kids:
            if a != b:
                assert not a.region.intersects(b.region)


@given(j=gens, num=st.integers(-1000, 1000), den_pow=st.integers(0, 8))
def test_generation_partitions_the_line(j, num, den_pow):
    x = F(num, 2**den_pow)
    q = containing_cube(x, j)
    assert q.contains_point((x,))
    # unique: the neighbours do not contain x
    for dk in (-1, 1):
        assert not DyadicCube(j, (q.k[0] + dk,)).contains_point((x,))


@given(j=gens, k=coords, up=st.integers(0, 5))
def test_ancestor_contains(j, k, up):
    q = DyadicCube(j, (k,))
    a = q.ancestor(up)
    assert a.j == j - up
    assert a.contains_cube(q)


@given(j=gens, k=coords)
def test_triple_is_concentric(j, k):
    q = DyadicCube(j, (k,))
    t = triple(q)
    assert t.volume == 3 * q.volume
    assert (t.lo[0] + t.hi[0]) / 2 == (q.region.lo[0] + q.region.hi[0]) / 2
