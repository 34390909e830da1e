"""Exception hierarchy shared by all softnull modules."""


class SoftNullError(Exception):
    """Base class for every error raised by this package."""


class NumericalError(SoftNullError):
    """A numerical routine failed to converge or produced non-finite output."""


class RankError(SoftNullError):
    """A matrix that must have full row/column rank does not."""


class CapabilityError(SoftNullError):
    """The requested user counts cannot be served by the available dimensions."""


class ConfigError(SoftNullError):
    """Invalid experiment configuration or command line."""


class TraceFormatError(SoftNullError):
    """Malformed channel trace file.

    Parameters
    ----------
    message : str
        Human readable description.
    offset : int
        Byte offset in the file where parsing failed.
    """

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class MagicMismatchError(TraceFormatError):
    pass


class UnsupportedVersionError(TraceFormatError):
    pass


class TruncatedTraceError(TraceFormatError):
    pass


class DimensionMismatchError(TraceFormatError):
    """Matrix shapes disagree with a header or with each other.

    Also raised outside file parsing (``offset`` is then -1), e.g. when a
    trace does not fit the configured array partition.
    """

    def __init__(self, message, offset=-1):
        if offset < 0:
            SoftNullError.__init__(self, message)
            self.offset = offset
        else:
            super().__init__(message, offset)
