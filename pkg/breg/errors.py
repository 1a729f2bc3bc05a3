"""Exception types for breg.

Every exception carries a short machine-readable `code`, which the CLI prints
as `error=<code> detail=<message>`.
"""

from typing import Optional


class BregError(Exception):
    """Base class for all breg errors."""
    code = "error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


class InputError(BregError, ValueError):
    """Malformed input file or argument."""
    code = "input-error"


class DomainError(BregError, ValueError):
    """A mathematically invalid request."""
    code = "domain-error"


class SupportMismatchError(DomainError):
    code = "support-mismatch"


class IndeterminateError(DomainError):
    """(+inf) + (-inf) met while summing extended reals."""
    code = "indeterminate"


class ZeroScaleMassError(DomainError):
    code = "zero-scale-mass"


class OutsideDomainError(DomainError):
    code = "outside-natural-parameter-domain"


class FormulaValidityError(DomainError):
    code = "formula-outside-validity-domain"


class OracleToleranceError(BregError):
    """Quadrature did not reach the requested tolerance."""
    code = "oracle-tolerance-not-met"

    def __init__(self, message: str = "", estimate: Optional[float] = None):
        super().__init__(message)
        self.estimate = estimate
