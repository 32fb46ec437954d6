"""Exception types raised by polywave."""


class PolywaveError(Exception):
    """Base class for all package errors."""


class NonConvergence(PolywaveError):
    """Simultaneous root iteration did not converge within the iteration cap.

    Usually an ill-conditioned input; reduce the order N.
    """


class OrderTooLarge(PolywaveError):
    pass


class SingularSystem(PolywaveError):
    pass


class NegativeOnCircle(PolywaveError):
    pass


class LevelMismatch(PolywaveError):
    pass


class PowerExceedsMultiplicity(PolywaveError):
    pass


class BadLength(PolywaveError):
    pass


class ShapeMismatch(PolywaveError):
    pass
