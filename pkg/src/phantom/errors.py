class PhantomError(Exception):
    """Base exception for phantom generation errors."""

    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class DegenerateGeometryError(PhantomError):
    """Raised when no sub-seed yields valid nuclei within the attempt limit."""

    def __init__(self, message: str, attempts: int | None = None):
        log_message = f"[attempts={attempts}] {message}" if attempts is not None else message
        super().__init__(log_message)
        self.attempts = attempts


class CohortTooSmallError(PhantomError):
    """Raised when a split would receive no subjects."""

    def __init__(self, message: str, n_subjects: int | None = None):
        super().__init__(message)
        self.n_subjects = n_subjects
