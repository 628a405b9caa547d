import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from morreylab.dyadic import Region
from morreylab.families import (
    FamilySpec,
    atoms_to_grid,
    dilate_atoms,
    generate,
    lacunary_atoms,
    random_atoms,
    random_pair,
)
from morreylab.grid import AlignmentError, DomainError, dilate, embed, indicator, power_profile


def test_single_atom_is_indicator():
    f = atoms_to_grid([(1, (1,), 2.0)], 1, 2, 4)
    g = indicator(Region.interval(0.5, 1), 4, 2).scaled(2.0)
    assert np.array_equal(f.values, g.values)


def test_atoms_add_up():
    f = atoms_to_grid([(0, (0,), 1.0), (1, (0,), 3.0)], 1, 1, 2)
    assert f.value_at(0.25) == 4.0 and f.value_at(0.75) == 1.0 and f.value_at(1.5) == 0.0


def test_atom_errors():
    with pytest.raises(AlignmentError):
        atoms_to_grid([(5, (0,), 1.0)], 1, 2, 4)
    with pytest.raises(DomainError):
        atoms_to_grid([(0, (2,), 1.0)], 1, 1, 4)


def test_lacunary_tower():
    atoms = lacunary_atoms(-1, 3, 0.5)
    assert atoms == [(-1, (0,), 1.0), (0, (0,), 2.0**0.5), (1, (0,), 2.0)]
    left = lacunary_atoms(0, 2, 0.0, anchor=-1)
    # the tower hangs off the point -1 toward 0: [-1,0), [-1,-1/2)
    f = atoms_to_grid(left, 1, 1, 2)
    assert f.value_at(-0.9) == 2.0 and f.value_at(-0.25) == 1.0


@given(seed=st.integers(0, 2**31), m=st.integers(-1, 1))
def test_dilated_atoms_match_grid_dilation(seed, m):
    atoms = random_atoms(np.random.default_rng(seed), 1, 2, -1, 3, 4)
    f = atoms_to_grid(atoms, 1, 2, 4)
    g = dilate(f, m)
    h = atoms_to_grid(dilate_atoms(atoms, m), 1, g.extent, g.gen)
    assert np.array_equal(g.values, h.values)


@given(seed=st.integers(0, 2**31), trial=st.integers(0, 1000))
def test_random_pair_reproducible(seed, trial):
    a = random_pair(seed, trial, 2, -1, 3)
    b = random_pair(seed, trial, 2, -1, 3)
    assert a == b
    for atoms in a:
        assert 1 <= len(atoms) <= 4
        assert all(-1 <= j <= 3 and amp > 0 for j, _, amp in atoms)


@given(seed=st.integers(0, 2**31))
def test_member_is_grid_independent(seed):
    spec = FamilySpec("random", seed=seed, jmax=3)
    coarse = generate(spec, 2, 4)
    fine = generate(spec, 2, 6)
    assert np.array_equal(embed(coarse, 2, 6).values, fine.values)


def test_generate_kinds():
    p = generate(FamilySpec("power-profile", beta=0.25, amplitude=2.0), 1, 3)
    assert np.allclose(p.values, 2.0 * power_profile(0.25, 3, 1).values)
    with pytest.raises(ValueError):
        FamilySpec("gaussian")
    with pytest.raises(ValueError):
        generate(FamilySpec("indicator"), 1, 3)


def test_two_dimensional_atoms():
    f = atoms_to_grid([(0, (0, -1), 1.0)], 2, 1, 2)
    assert f.value_at((0.5, -0.5)) == 1.0 and f.value_at((-0.5, -0.5)) == 0.0
    assert f.values.sum() * f.cell_volume == pytest.approx(1.0)
