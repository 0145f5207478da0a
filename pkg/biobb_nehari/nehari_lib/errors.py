"""Exceptions raised by the biobb_nehari numerical library."""


class NehariError(Exception):
    """Base class of every library error."""


class InvalidInputError(NehariError, ValueError):
    """Malformed input: non-finite values, bad exponents, unknown family..."""


class DomainOverflowError(NehariError):
    """A dilation pushes the support of a function beyond the truncation radius."""


class ProjectionError(NehariError):
    """The fiber through a function does not meet the requested Nehari branch."""


class NoRootsError(NehariError):
    """A quotient equation has no positive root for the given level."""


class DegenerateError(NehariError):
    """The level coincides with the maximum of a quotient (tangency)."""


class InvalidQuotientError(NehariError):
    """The functional handed to the minimizer is not 0-homogeneous."""


class PreconditionError(NehariError):
    """A parameter lies outside the window where the operation is defined."""


class InfeasibleError(NehariError):
    """No start of a constrained minimization reached the admissible set."""


class NonexistenceError(NehariError):
    """The exponent configuration admits no nontrivial solution."""
