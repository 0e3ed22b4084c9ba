class NetworkError(Exception):
    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class ShapeMismatchError(NetworkError):
    """Raised when tensor shapes or channel counts are incompatible."""

    def __init__(
        self,
        message: str,
        expected: tuple[int, ...] | None = None,
        actual: tuple[int, ...] | None = None,
    ):
        super().__init__(message)
        self.expected = expected
        self.actual = actual


class CheckpointError(NetworkError):
    """Raised when a checkpoint cannot be written, read or applied."""

    def __init__(self, message: str, path: str | None = None):
        log_message = f"[path={path}] {message}" if path is not None else message
        super().__init__(log_message)
        self.path = path
