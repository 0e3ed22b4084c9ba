class ExperimentError(Exception):
    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class MissingModalityError(ExperimentError):
    """Raised when a combination needs a modality the cohort does not provide."""

    def __init__(self, message: str, modality: str | None = None):
        log_message = f"[modality={modality}] {message}" if modality is not None else message
        super().__init__(log_message)
        self.modality = modality


class EmptySubsetError(ExperimentError):
    """Raised when a training fraction selects no subject."""

    def __init__(self, message: str, fraction: float | None = None):
        super().__init__(message)
        self.fraction = fraction


class UndefinedCohortError(ExperimentError):
    """Raised when every test subject has only undefined metrics."""

    def __init__(self, message: str = "every subject has undefined metrics"):
        super().__init__(message)
