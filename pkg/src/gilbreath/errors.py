"""Exception types shared across the package."""


class GilbreathError(Exception):
    """Base class for all errors raised by this package."""


class RangeTooLargeError(GilbreathError):
    """Requested range exceeds what the segmented sieve supports."""


class GapOverflowError(GilbreathError):
    """A prime gap does not fit the 16-bit row representation."""


class RowExhaustedError(GilbreathError):
    """A difference step was requested on a row that is too short."""


class StepBudgetExhaustedError(GilbreathError):
    """No terminal row was reached within the allowed number of steps.

    Usually means the window or overlap is too small; retry with a larger one.
    """

    def __init__(self, message, steps_tried=None):
        super().__init__(message)
        self.steps_tried = steps_tried


class OverlapExhaustedError(GilbreathError):
    """At least one slice needed as many steps as the overlap provides.

    The run is invalid and must be restarted with a larger overlap.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class GapTableError(GilbreathError):
    """Malformed record-gap table input."""

    def __init__(self, message, line_number=None):
        super().__init__(message)
        self.line_number = line_number


class ResultLogError(GilbreathError):
    """Malformed or unusable slice-result log."""

    def __init__(self, message, line_number=None):
        super().__init__(message)
        self.line_number = line_number
