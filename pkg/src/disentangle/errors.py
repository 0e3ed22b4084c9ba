class DisentangleError(Exception):
    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class ThetaTooSmallError(DisentangleError):
    """Raised when the low-frequency crop would be empty on some axis."""

    def __init__(
        self,
        message: str = "theta too small for shape",
        shape: tuple[int, ...] | None = None,
        theta: float | None = None,
    ):
        super().__init__(message)
        self.shape = shape
        self.theta = theta
