"""Exception hierarchy shared by every fncalc module."""


class FNCalcError(Exception):
    """Base class for user-facing errors."""


class CapacityError(FNCalcError):
    """A tag index fell outside the 64-tag word, or the tag budget ran out."""


class ArityError(FNCalcError):
    """Wrong number of arguments, dimensions or degrees."""


class DegreeError(ArityError):
    """A form or semiform was applied to a cube of the wrong degree."""


class ContaminationError(FNCalcError):
    """A Weil vector carries tags other than the declared cube tags."""


class AgreementError(FNCalcError):
    """Two microcubes were supposed to agree on some coefficients but do not."""

    def __init__(self, message, coefficient=None, gap=None):
        super().__init__(message)
        self.coefficient = coefficient
        self.gap = gap


class InverseError(FNCalcError):
    """A supplied polynomial inverse does not invert the map."""


class ConsistencyError(AssertionError):
    """An agreement that holds for every valid input failed.

    Raised for structural guarantees (pair squares agreeing on D(2), edges of a
    connection completion) whose failure indicates an engine bug rather than a
    bad input.
    """


class TagCollisionError(FNCalcError):
    """The evaluation tag is already in use inside the cube."""
