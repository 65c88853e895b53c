"""Exception types shared across the package."""


class GridBenchError(Exception):
    """Base class for all harness errors."""


class PlacementExhausted(GridBenchError):
    """Obstacle rejection sampling ran out of attempts."""

    def __init__(self, message: str, env_index: int | None = None):
        super().__init__(message)
        self.env_index = env_index


class SamplingExhausted(GridBenchError):
    """No valid origin/destination pair could be drawn."""

    def __init__(self, message: str, env_index: int | None = None):
        super().__init__(message)
        self.env_index = env_index


class InvalidEndpoint(GridBenchError):
    """A solver endpoint is out of bounds or inside an obstacle."""


class UndefinedMetric(GridBenchError):
    """A metric has no value for the given population (e.g. zero feasible routes)."""


class UnknownKind(GridBenchError):
    """A prompt or agent kind outside the supported enumeration."""


class ConfigError(GridBenchError):
    """Invalid run configuration or missing credential."""


class EmptyResults(GridBenchError):
    """A results file holds no case records."""
