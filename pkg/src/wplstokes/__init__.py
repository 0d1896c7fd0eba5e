"""Numerical Stokes data for weighted projective lines, compared with Euler matrices.

The package has four computational layers and a command-line driver:

* :mod:`wplstokes.orbifold` - exact Picard group, graded dimensions and the
  Euler matrix of the canonical line-bundle collection;
* :mod:`wplstokes.jacobian` - the unfolding F_A, its Jacobian algebra,
  critical data, exponents and admissible-line analysis;
* :mod:`wplstokes.lattice` - Picard-Lefschetz lattice calculus, braid and
  sign moves, Coxeter invariants and the move-sequence search;
* :mod:`wplstokes.mirror1d` - thimble tracing and numerical Stokes matrices
  for the a1 = 1 family;
* :mod:`wplstokes.cli` - ``wplstokes`` subcommands and JSON reports.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import WplError  # noqa: E402
from .orbifold import (  # noqa: E402
    EulerMatrix,
    OrbifoldType,
    PicElement,
    canonical_collection_euler_matrix,
    euler_pairing,
    graded_dim,
    make_orbifold,
)

__all__ = [
    "__version__",
    "WplError",
    "EulerMatrix",
    "OrbifoldType",
    "PicElement",
    "canonical_collection_euler_matrix",
    "euler_pairing",
    "graded_dim",
    "make_orbifold",
]
