"""Exception hierarchy shared by all eitlab modules.

Every error carries an ``exit_code`` so the command-line front end can map
failures onto its documented exit-code contract (2 = usage/config,
3 = physics domain, 4 = numerical failure).
"""


class EitlabError(Exception):
    """Base class for all eitlab errors."""

    exit_code = 1


class ConfigError(EitlabError):
    """Configuration input could not be parsed or validated."""

    exit_code = 2


class DomainError(EitlabError):
    """A physics precondition is violated."""

    exit_code = 3


class NumericalError(EitlabError):
    """A numerical procedure failed or would produce garbage."""

    exit_code = 4


class ZeroBrightCoupling(DomainError):
    """The two couplings feeding the upper excited state are both zero."""


class WrongSituation(DomainError):
    """A closed form was requested outside its interference regime."""


class NoDarkState(DomainError):
    """The global dark state degenerates (interference coefficient is zero)."""


class PreconditionViolated(DomainError):
    """A closed-form steady state was evaluated outside its validity range."""


class WrongSign(DomainError):
    """Requested soliton kind is incompatible with the coefficient signs."""


class UnknownField(ConfigError):
    """A sweep specification names a field the configuration does not have."""


class SingularMatrix(NumericalError):
    """Linear system matrix is singular to working precision."""


class SingularDenominator(NumericalError):
    """The response denominator is too close to zero to divide by."""


class NonConvergence(NumericalError):
    """Time integration did not settle to a steady state."""


class StepTooLarge(NumericalError):
    """Step size does not resolve the fastest scale of the problem."""


class GridTooNarrow(NumericalError):
    """Field does not decay (or wrap smoothly) at the grid edges."""


class GridMismatch(NumericalError):
    """Two envelopes live on different grids."""


class BadLength(NumericalError):
    """Array length is not usable by the spectral kernels."""
