"""Exception types shared across the package."""


class ResourceCapError(RuntimeError):
    """A configured iteration, state-count or horizon cap was exceeded."""


class NotWinningError(Exception):
    """Synthesis was requested for an instance that is not winning in that mode."""
