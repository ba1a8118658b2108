"""subspec: spectral calculus for sub-Laplacians on the plane motion group
SE(2) and on abelian groups R^n x T^m.

Core pieces:

* ``mathieu``  -- eigencurves of -d^2 + q sin^2 on the circle, split into
  the four parity classes.
* ``se2``      -- sub-Laplacian normal forms, branch maps, Plancherel
  density, convolution-kernel synthesis and reconstruction.
* ``abelian``  -- the explicit kernel transform on R^n x T^m, including
  the discontinuous transform kernel on R x T.
* ``verify``   -- the quantitative acceptance checks, runnable from the
  CLI (``subspec verify --suite all``).
"""

from . import abelian, grids, mathieu, multipliers, numerics, se2, verify
from ._backend import backend_name
from .mathieu import (
    ALL_CLASSES,
    MathieuEigenpair,
    ParityClass,
    SpectralBranch,
    TruncationConfig,
    assemble_operator,
    asymptotic_profile,
    count_zeros,
    dlambda_dq,
    eval_eigenfunction,
    solve_branch,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_CLASSES",
    "MathieuEigenpair",
    "ParityClass",
    "SpectralBranch",
    "TruncationConfig",
    "abelian",
    "assemble_operator",
    "asymptotic_profile",
    "backend_name",
    "count_zeros",
    "dlambda_dq",
    "eval_eigenfunction",
    "grids",
    "mathieu",
    "multipliers",
    "numerics",
    "se2",
    "solve_branch",
    "verify",
]
