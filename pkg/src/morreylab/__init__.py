"""Numerical workbench for Morrey norms and bilinear fractional integrals.

Functions are nonnegative and piecewise constant on a dyadic lattice; see
:class:`morreylab.grid.GridFunction`.
"""

from .bounds import (
    CheckReport,
    DegenerateInputError,
    ExponentTuple,
    InapplicableError,
    check_heyan,
    check_kenig_stein,
    derive_exponents,
    theorem_ratio,
)
from .dyadic import DyadicCube, Region
from .grid import (
    GridError,
    GridFunction,
    hl_maximal,
    indicator,
    load_function,
    morrey_norm_dyadic,
    morrey_norm_general,
    powered_maximal,
    save_function,
)
from .operators import (
    bilinear_grafakos,
    bilinear_ks,
    dyadic_majorant,
    frac_integral,
    powered_frac,
    surrogate_sigma,
)

__version__ = "0.1.0"
