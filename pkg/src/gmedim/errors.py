"""Exception hierarchy shared by all modules."""


class GmeError(Exception):
    """Base class for errors raised by gmedim."""


class ParameterError(GmeError, ValueError):
    """A parameter is outside its documented range."""


class InvalidLabelError(ParameterError):
    """A basis label does not fit the system shape."""


class InvalidBipartitionError(ParameterError):
    """A party subset is empty, full, or out of range where a bipartition is required."""


class ValidationError(GmeError, ValueError):
    """A density matrix or state violates hermiticity, trace, norm or positivity."""


class InvalidStateError(ValidationError):
    """A matrix element needed by a criterion is inconsistent with a valid state."""


class SizeGuardError(GmeError):
    """A brute-force computation would exceed the desk-scale size limit."""


class UnsupportedInputError(GmeError, ValueError):
    """The input kind is not supported by the requested operation."""
