"""Exception types shared across the toolkit."""


class RenewlimError(Exception):
    """Base class for all toolkit-specific failures."""


class DomainError(RenewlimError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """The gamma function was evaluated at a non-positive integer."""


class NoBracketError(RenewlimError, RuntimeError):
    """The scaling-equation solver could not bracket a root.

    Raised when the initial bracket around x**(1/alpha) fails to straddle
    the root even after repeated widening, which signals that x is below
    the regime where c**alpha / ell(c) is monotone.
    """


class ToleranceNotMetError(RenewlimError, RuntimeError):
    """An adaptive numerical routine stalled above its error target."""


class ParameterMismatchError(RenewlimError, ValueError):
    """Supplied parameters are inconsistent with the requested case."""


class CaseMismatchError(RenewlimError, ValueError):
    """A convergence case was requested for a law outside its regime."""


class SpecParseError(RenewlimError, ValueError):
    """A distribution / scaling-function spec string failed to parse."""


class ConfigError(RenewlimError, ValueError):
    """A CLI/JSON experiment configuration is invalid.

    The message is a single line naming the offending field.
    """
