"""Exception types raised by the model."""


class RBSPError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(RBSPError, ValueError):
    """An argument lies outside the domain of a formula."""


class VariantError(RBSPError, TypeError):
    """A source of the wrong kind was passed (e.g. WCP where HSPS is required)."""


class DegenerateProtocolError(RBSPError, ValueError):
    """Decoy intensities make a bound's denominator vanish."""


class UndefinedRateError(RBSPError, ZeroDivisionError):
    """A rate is normalised by a gain that is zero."""


class BranchError(RBSPError, ValueError):
    """A measurement branch with zero probability was requested."""
