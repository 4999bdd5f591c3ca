"""Exception hierarchy shared across the package."""


class AdvlensError(Exception):
    """Base class for all advlens errors."""


class EmptyInputError(AdvlensError):
    """An operation received an empty sequence, image, or stream."""


class InvalidDimensionError(AdvlensError):
    """Image or target dimensions are zero, negative, or malformed."""


class InvalidParameterError(AdvlensError):
    """A numeric parameter is outside its valid range (e.g. sigma <= 0)."""


class ManifestError(AdvlensError):
    """Dataset manifest references a missing or inconsistent resource."""


class EmptyDatasetError(AdvlensError):
    """Dataset loaded successfully but contains no samples."""


class ParseError(AdvlensError):
    """A structured input file does not have the expected shape."""


class InputMismatchError(AdvlensError):
    """Paired metric inputs have inconsistent lengths."""


class InvalidPredictionError(AdvlensError):
    """A prediction list is too short or contains duplicate classes."""


class InvalidBoxError(AdvlensError):
    """A box has non-positive width or height."""


class BackendUnavailableError(AdvlensError):
    """Backend process failed to start or to complete the handshake."""


class ProtocolError(AdvlensError):
    """Backend sent a malformed, out-of-order, or task-mismatched message."""


class RunError(AdvlensError):
    """A matrix run produced no usable cells."""


class ReportError(AdvlensError):
    """A report is missing the cells a derived table needs."""
