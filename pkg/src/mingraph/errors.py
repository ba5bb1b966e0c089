"""Exception hierarchy shared by all modules."""


class MingraphError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(MingraphError, ValueError):
    """A parameter record or constant violates its stated constraints."""


class DomainError(MingraphError, ValueError):
    """An argument lies outside the domain of the requested function."""


class PoleError(DomainError):
    """A ratio or characteristic function was evaluated at a pole."""


class DivergenceError(DomainError):
    """An improper integral diverges (e.g. F(phi, 1) with |phi| >= pi/2)."""


class SingularError(DomainError):
    """A point lies inside the exclusion band of a singular curve."""


class EvaluationDomainError(DomainError):
    """A finite-difference stencil left the domain of the field."""


class DegenerateGradientError(MingraphError, ArithmeticError):
    """The gradient vanishes where a quotient by it is required."""


class BranchError(MingraphError, ArithmeticError):
    """A logarithm crossed a branch cut inside a stencil."""


class TrivialLocusError(MingraphError, ArithmeticError):
    """g'^3 - g' vanishes, so the transformation ODE cannot be tested."""


class NonIntegrableError(MingraphError, ArithmeticError):
    """An integrand has a pole inside the integration interval."""


class EmptyDomainError(MingraphError, ValueError):
    """No admissible point or interval could be found."""


class MismatchError(MingraphError, TypeError):
    """A transformation was combined with an incompatible family."""


class RangeMismatchError(MingraphError, ValueError):
    """Most sampled heights fall outside the transformation's domain."""


class NoCrossingError(MingraphError, ValueError):
    """Bisection could not find a sign change of an implicit function."""
