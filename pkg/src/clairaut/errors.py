"""Exception hierarchy shared by every module."""


class ClairautError(Exception):
    """Base class for all library errors."""


class ParseError(ClairautError):
    def __init__(self, message, offset=0, expected=()):
        self.offset = offset
        self.expected = tuple(sorted(expected))
        detail = f"{message} at byte {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class UnknownFunction(ParseError):
    def __init__(self, name, offset):
        self.name = name
        super().__init__(f"unknown function {name!r}", offset)


class DomainError(ClairautError, ArithmeticError):
    """Evaluation left the real domain (sqrt of negative, ln of non-positive, ...).

    ``subexpr`` names the offending subexpression when it is known.
    """

    def __init__(self, message, subexpr=None):
        self.subexpr = subexpr
        if subexpr is not None:
            message = f"{message} in {subexpr}"
        super().__init__(message)


class NoBracket(ClairautError):
    pass


class MaxIterations(ClairautError):
    pass


class NoRoots(ClairautError):
    pass


class OutOfDomain(ClairautError):
    pass


class ExcludedParameter(OutOfDomain):
    pass


class DegenerateDirection(ClairautError):
    pass


class NotOnSurface(ClairautError):
    pass


class VerticalTangent(ClairautError):
    """|F_z| vanishes: z is not locally a function of (x, y) here."""


class CandidateNotOnFamily(ClairautError):
    pass


class UnknownEntry(ClairautError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class SpecError(ClairautError):
    """Malformed family spec or command-line usage."""
