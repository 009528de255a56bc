"""Exception hierarchy shared by all modules."""


class Lagrange3Error(Exception):
    """Base class for every error raised by the package."""


class InvalidTriple(Lagrange3Error, ValueError):
    """The triple does not satisfy a^2 + b^2 + c^2 = abc."""


class NoNormalizedCompletion(Lagrange3Error, ValueError):
    """Neither root of the Fricke quadratic lies in [b, ab/2)."""


class NonrealRoot(Lagrange3Error, ValueError):
    """The Fricke quadratic has negative discriminant."""


class IrrationalCompletion(Lagrange3Error, ValueError):
    """Exact mode was asked for a completion that is not rational."""


class NotElliptic(Lagrange3Error, ValueError):
    pass


class NotHyperbolic(Lagrange3Error, ValueError):
    pass


class AnchoredAtInfinity(Lagrange3Error, ValueError):
    pass


class DivergentWord(Lagrange3Error, ZeroDivisionError):
    """A signed continued-fraction word evaluates with zero denominator."""


class RationalInput(Lagrange3Error, ValueError):
    """A Lagrange estimate was requested for a (short) finite expansion."""


class CaseUnsupported(Lagrange3Error, ValueError):
    pass


class MoveRejected(Lagrange3Error, ValueError):
    """The nu move is only defined at the root of the tree."""


class DisjointnessViolation(Lagrange3Error):
    """Two excised intervals overlap after reduction modulo the period."""

    def __init__(self, message, pairs=()):
        super().__init__(message)
        self.pairs = list(pairs)
