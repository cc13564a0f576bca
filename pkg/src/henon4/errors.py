"""Exception types shared across the package."""


class Henon4Error(Exception):
    """Base class for all package errors."""


class DomainError(Henon4Error, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NonConvergence(Henon4Error):
    """Adaptive quadrature exhausted its subdivision budget."""


class NonFinite(Henon4Error):
    """An integrand returned a non-finite value at an interior node."""


class Divergent(Henon4Error):
    """Tail blocks of a half-line integral grow instead of decaying."""


class ThresholdError(Henon4Error, ValueError):
    """A series bound was requested at or above its summability threshold."""


class PreconditionError(Henon4Error, ValueError):
    """An operation's stated hypothesis is violated by the input."""


class OptFailure(Henon4Error):
    """Every start of a maximization failed to produce a usable value."""
