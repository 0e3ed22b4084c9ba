class VolumeError(Exception):
    """Base exception for volume-related errors."""

    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class InvalidVolumeError(VolumeError):
    """Raised when a grid has an unsupported shape or non-finite values."""

    def __init__(self, message: str):
        super().__init__(message)


class DegenerateRangeError(VolumeError):
    """Raised when a constant volume is min-max normalized."""

    def __init__(self, message: str = "degenerate range", value: float | None = None):
        super().__init__(message)
        self.value = value


class RvolFormatError(VolumeError):
    """Raised when an RVOL header or payload cannot be read."""

    def __init__(self, message: str, path: str | None = None):
        log_message = f"[path={path}] {message}" if path is not None else message
        super().__init__(log_message)
        self.path = path
