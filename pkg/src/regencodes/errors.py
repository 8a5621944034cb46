"""Exception hierarchy shared by every module."""


class RegenError(Exception):
    """Base class for all errors raised by regencodes."""


class FieldError(RegenError):
    """Invalid field construction or an undefined field operation."""


class SingularMatrixError(RegenError):
    def __init__(self, message, rank=None):
        super().__init__(message)
        self.rank = rank


class CodeConfigError(RegenError):
    """Parameters that no code of the requested scheme can satisfy."""


class InsufficientSharesError(RegenError):
    pass


class UndecodableError(RegenError):
    """Shares are present but their coefficient rows do not span the message."""


class ShareFormatError(RegenError):
    pass
