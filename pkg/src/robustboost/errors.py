"""Exception hierarchy.

The CLI maps these onto exit codes: DataError -> 2, NumericalError
(and subclasses) -> 3.  Usage problems exit 1 via argument parsing.
"""


class DataError(ValueError):
    """Malformed or inconsistent input data (CSV cells, shapes, names)."""


class NumericalError(RuntimeError):
    """A numerical procedure could not produce a valid result."""


class DegenerateScaleError(NumericalError):
    """All residuals are exactly zero; the scale equation has no positive root."""


class NoRootError(NumericalError):
    """The scale equation cannot be bracketed (typically too many identical
    residuals for the requested breakdown level)."""


class AllOutlyingError(NumericalError):
    """Every observation sits in the flat region of the bounded loss; the
    scale gradient is undefined."""


class LineSearchError(NumericalError):
    """The one-dimensional objective evaluated to a non-finite value."""
