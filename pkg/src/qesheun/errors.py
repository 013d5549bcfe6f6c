"""Exception hierarchy."""


class QesError(Exception):
    """Base class for all domain errors raised by the package."""


class RootCountMismatch(QesError):
    """Fewer real spectral roots than the invariant-module dimension."""


class NotARoot(QesError):
    """A supplied accessory parameter is not a root of the critical polynomial."""


class NotQes(QesError):
    """Parameters violate the quasi-exact solvability condition."""


class ConstraintViolated(QesError):
    """A reduction was requested for parameters outside its constraint set."""


class SingularPoint(QesError):
    """Evaluation requested at a pole of a weight or gauge factor."""


class Divergent(QesError):
    """An integral does not converge for the given parameters."""


class SingularSystem(QesError):
    """A linear system is numerically singular."""


class InvalidCase(QesError):
    """Inconsistent quantum numbers or branch specification."""


class EliminationDegenerate(QesError):
    """The resultant vanishes identically; the two curves share a component."""


class NoMatchingRoot(QesError):
    """No spectral root reproduces the common separation constant."""


class AmbiguousRoot(QesError):
    """More than one spectral root reproduces the common separation constant."""


class NotNormalizable(QesError):
    """The squared norm integral diverges."""
