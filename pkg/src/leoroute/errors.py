"""Exceptions raised by leoroute."""


class ConfigurationError(ValueError):
    """Invalid constellation, traffic or experiment configuration."""


class UnreachableError(RuntimeError):
    """No finite-cost route exists between two ground stations."""

    def __init__(self, source, destination, message=None):
        self.source = source
        self.destination = destination
        super().__init__(message or f"no finite-cost route between GS {source} and GS {destination}")


class DegenerateError(RuntimeError):
    """A statistic was requested over an empty or unloaded input."""
