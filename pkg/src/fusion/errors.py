class FusionError(Exception):
    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class CropShapeMismatchError(FusionError):
    """Raised when a low-frequency prior does not have the crop shape of the target."""

    def __init__(
        self,
        message: str,
        expected: tuple[int, ...] | None = None,
        actual: tuple[int, ...] | None = None,
    ):
        super().__init__(message)
        self.expected = expected
        self.actual = actual


class MissingDonorError(FusionError):
    """Raised when a prior modality has no donor volume."""

    def __init__(self, message: str, modality: str | None = None):
        super().__init__(message)
        self.modality = modality


class EmptyDatasetError(FusionError):
    def __init__(self, message: str = "Training set is empty"):
        super().__init__(message)
