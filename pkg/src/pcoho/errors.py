"""Exception hierarchy shared across the package."""


class PcohoError(Exception):
    """Base class for all library errors."""


class StructureError(PcohoError):
    """Shapes or field values are malformed (distinct from axiom failure)."""


class CapacityError(PcohoError):
    """Requested computation exceeds the configured desk-scale limits."""


class BidegreeError(PcohoError):
    """A coboundary was requested at an illegal bidegree."""


class InvalidInputError(PcohoError):
    """An operation received data that fails a required validity check.

    Carries the offending validation report when one exists.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
