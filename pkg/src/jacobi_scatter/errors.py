"""Exception types shared across the package.

Each exception carries a short machine-readable `kind` used by the service
layer to pick an HTTP status and by the command line client to pick an exit
code: validation -> 1, numerical -> 2, crosscheck -> 3.
"""

__all__ = ["JacobiScatterError", "ValidationError", "NumericalError", "CrossCheckError"]


class JacobiScatterError(Exception):
    """Base class for errors raised by this package."""

    kind = "internal"
    exit_code = 1


class ValidationError(JacobiScatterError):
    """Malformed or inconsistent input (bad shapes, non-Hermitian blocks,
    parameters outside their domain)."""

    kind = "validation"
    exit_code = 1


class NumericalError(JacobiScatterError):
    """A computation could not be completed reliably (ill-conditioned
    inversion, evaluation too close to a branch point)."""

    kind = "numerical"
    exit_code = 2


class CrossCheckError(JacobiScatterError):
    """Two independent computations of the same quantity disagree beyond
    tolerance."""

    kind = "crosscheck"
    exit_code = 3
