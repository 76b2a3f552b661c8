"""Exception hierarchy."""

from __future__ import annotations


class AuthorDriftError(Exception):
    """Base class for all package errors."""


class EmptyName(AuthorDriftError, ValueError):
    pass


class UnparsableName(AuthorDriftError, ValueError):
    pass


class InvalidIdentifier(AuthorDriftError, ValueError):
    pass


class SelfLoop(AuthorDriftError, ValueError):
    pass


class IoFailure(AuthorDriftError, OSError):
    """A dump could not be opened or read. Always fatal."""


class MissingTitle(AuthorDriftError, ValueError):
    pass


class CalibrationUnderflow(AuthorDriftError):
    """Too few declared couples to calibrate a similarity interval."""

    def __init__(self, usable: int, required: int):
        super().__init__(
            f"calibration needs at least {required} declared couples with usable "
            f"features, found {usable}"
        )
        self.usable = usable
        self.required = required


class AuthorlessEndpoint(AuthorDriftError):
    pass


class UnresolvableEndpoint(AuthorDriftError):
    pass
