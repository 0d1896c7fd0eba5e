"""Exception hierarchy shared by every stage of the pipeline.

Each class carries a ``stage`` label so the command-line driver can report
where a run stopped and map the failure onto an exit code.
"""

from __future__ import annotations


class WplError(Exception):
    """Base class for all toolkit errors."""

    stage = "general"
    exit_code = 5


# --- categorical side -------------------------------------------------------

class NonPositiveEuler(WplError):
    stage = "orbifold"
    exit_code = 3


# --- Landau-Ginzburg side ---------------------------------------------------

class DimensionMismatch(WplError):
    stage = "jacobian"


class DegeneratePoint(WplError):
    stage = "critical"
    exit_code = 3


class NewtonDivergence(WplError):
    stage = "critical"


class ZeroHessian(WplError):
    stage = "critical"
    exit_code = 3


class Inadmissible(WplError):
    stage = "sector"
    exit_code = 3


# --- one-dimensional mirror -------------------------------------------------

class NotReducible(WplError):
    stage = "mirror1d"
    exit_code = 3


class DegenerateCritical(WplError):
    stage = "mirror1d"
    exit_code = 3


class SaddleCollision(WplError):
    stage = "thimble"


class StepFailure(WplError):
    stage = "thimble"


class DecayViolation(WplError):
    stage = "quadrature"


class QuadratureStall(WplError):
    stage = "quadrature"


class IllConditioned(WplError):
    stage = "stokes"


class NonIntegerEntry(WplError):
    stage = "stokes"


class TriangularityViolation(WplError):
    stage = "stokes"


# --- lattice ----------------------------------------------------------------

class MoveError(WplError):
    stage = "lattice"
    exit_code = 2


class EquivalenceInconclusive(WplError):
    """Search exhausted its budget; this is *not* a proof of inequivalence."""

    stage = "equivalence"
    exit_code = 4

    def __init__(self, depth: int, explored: int = 0):
        super().__init__(f"no move sequence found up to depth {depth} "
                         f"({explored} states explored)")
        self.depth = depth
        self.explored = explored
