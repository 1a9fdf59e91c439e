"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: input/parse problems -> 1,
domain/convergence problems -> 2, anything else -> 3.
"""


class RcmflexError(Exception):
    """Base class for all toolkit errors."""


class InputError(RcmflexError):
    """Malformed input file or inconsistent user-supplied configuration."""


class DomainError(RcmflexError):
    """A quantity violates the physical/mathematical domain of an operation."""


class SingularMatrixError(DomainError):
    """Matrix inversion requested for a (near-)singular matrix."""


class MechanismError(DomainError):
    """Global stiffness is singular: the model has unconstrained rigid-body modes."""


class ConstructionError(DomainError):
    """Joint geometry cannot be built from the given parameters."""


class EllipseFitError(DomainError):
    """Conic fitting failed or the best-fit conic is not an ellipse."""


class EmptyStudyError(DomainError):
    """A feasibility study contains no successful evaluations."""


class ConvergenceError(RcmflexError):
    """Iterative procedure exhausted its budget without meeting tolerance."""
