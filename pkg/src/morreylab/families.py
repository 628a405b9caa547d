"""Test-function families built from weighted dyadic indicators.

A family member is a list of atoms ``(j, k, amplitude)`` meaning
``amplitude * chi_{Q_{jk}}``.  Atoms carry no grid, so one member can be
realized exactly on every lattice fine enough to resolve it, and dilation by
``2**m`` just shifts every generation by ``m``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import DomainError, AlignmentError, GridFunction, power_profile

__all__ = [
    "Atom",
    "FamilySpec",
    "FAMILY_KINDS",
    "atoms_to_grid",
    "dilate_atoms",
    "random_atoms",
    "lacunary_atoms",
    "random_pair",
    "generate",
]

Atom = tuple[int, tuple[int, ...], float]

FAMILY_KINDS = ("indicator", "lacunary-sum", "power-profile", "random")


def atoms_to_grid(atoms, n: int, extent: int, gen: int) -> GridFunction:
    cells = 2 ** (extent + 1 + gen)
    origin = 2 ** (extent + gen)
    vals = np.zeros((cells,) * n)
    for j, k, amp in atoms:
        if j > gen:
            raise AlignmentError(f"atom of generation {j} is finer than the grid ({gen})")
        w = 2 ** (gen - j)
        sl = []
        for kc in k:
            a = origin + kc * w
            if a < 0 or a + w > cells:
                raise DomainError(f"atom Q_({j},{k}) leaves the domain of extent {extent}")
            sl.append(slice(a, a + w))
        vals[tuple(sl)] += amp
    return GridFunction(n, extent, gen, vals)


def dilate_atoms(atoms, m: int) -> list[Atom]:
    """Atoms of ``x -> f(2**m x)``."""
    return [(j + m, k, amp) for j, k, amp in atoms]


def random_atoms(rng: np.random.Generator, n: int, extent: int, jmin: int, jmax: int, count: int) -> list[Atom]:
    """``count`` atoms with lacunary side lengths spread over ``[jmin, jmax]``."""
    jmin = max(jmin, -extent)
    atoms = []
    for _ in range(count):
        j = int(rng.integers(jmin, jmax + 1))
        span = 2 ** (extent + j)  # cubes of generation j per half-axis
        k = tuple(int(v) for v in rng.integers(-span, span, size=n))
        amp = float(np.exp(rng.normal(0.0, 0.75)))
        atoms.append((j, k, amp))
    return atoms


def lacunary_atoms(j0: int, count: int, decay: float, n: int = 1, anchor: int = 0) -> list[Atom]:
    """A nested tower of cubes at the lattice point ``anchor * 2**-j0``.

    Generation ``j0 + m`` carries amplitude ``2**(m * decay)``.
    """
    atoms = []
    for m in range(count):
        j = j0 + m
        k = (anchor * 2**m,) * n
        atoms.append((j, k, 2.0 ** (m * decay)))
    return atoms


def random_pair(seed: int, trial: int, extent: int, jmin: int, jmax: int, sparsity: int = 4, n: int = 1):
    """Two independent random atom lists, reproducible from ``(seed, trial)``."""
    rng = np.random.default_rng([seed, trial])
    c1 = int(rng.integers(1, sparsity + 1))
    c2 = int(rng.integers(1, sparsity + 1))
    return (
        random_atoms(rng, n, extent, jmin, jmax, c1),
        random_atoms(rng, n, extent, jmin, jmax, c2),
    )


@dataclass(frozen=True)
class FamilySpec:
    """One member of a test family, independent of the grid."""

    kind: str
    seed: int = 0
    atoms: tuple = field(default_factory=tuple)
    beta: float = 0.5
    amplitude: float = 1.0
    sparsity: int = 4
    jmin: int = -1
    jmax: int = 4
    n: int = 1

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")


def generate(spec: FamilySpec, extent: int, gen: int) -> GridFunction:
    """Realize ``spec`` on the ``(extent, gen)`` lattice; same spec, same function."""
    if spec.kind == "power-profile":
        return power_profile(spec.beta, gen, extent, spec.n).scaled(spec.amplitude)
    if spec.kind == "random":
        rng = np.random.default_rng(spec.seed)
        atoms = random_atoms(rng, spec.n, extent, spec.jmin, spec.jmax, spec.sparsity)
    else:
        atoms = list(spec.atoms)
        if not atoms:
            raise ValueError(f"{spec.kind} family member has no atoms")
    f = atoms_to_grid(atoms, spec.n, extent, gen)
    return f.scaled(spec.amplitude) if spec.amplitude != 1.0 else f
