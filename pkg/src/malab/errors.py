"""Exception hierarchy. Every failure the solvers can signal derives from
:class:`MalabError` so the CLI can map it to an exit status."""


class MalabError(Exception):
    pass


class InputError(MalabError, ValueError):
    """Rejected input (bad grid, non-overlapping ranges, too few points)."""


class OrderMismatchError(InputError):
    pass


class SingularReciprocalError(MalabError, ZeroDivisionError):
    pass


class DomainError(InputError):
    """Argument outside the domain of the operation."""


class DegenerateProfileError(InputError):
    pass


class RegimeError(InputError):
    """The exponent regime does not admit the requested construction."""


class ContractionError(InputError):
    """The truncation order violates (n - 1)/(2 kappa - 1) < 1."""


class ConvergenceError(MalabError):
    pass


class StiffnessError(MalabError):
    """The adaptive step fell below the minimum step."""


class InvariantError(MalabError):
    """A mathematical invariant failed on computed output."""


class BandViolationError(InvariantError):
    pass


class RangeError(MalabError):
    """A bracket could not be found in the allowed search range."""


class SingularityError(MalabError):
    pass
