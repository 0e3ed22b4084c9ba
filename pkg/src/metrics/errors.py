class MetricsError(Exception):
    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class UndefinedMetricError(MetricsError):
    """Raised when a metric has no value for the given masks (e.g. empty ground truth)."""

    def __init__(self, message: str = "undefined metric", metric: str | None = None):
        log_message = f"[metric={metric}] {message}" if metric is not None else message
        super().__init__(log_message)
        self.metric = metric
