"""Exception types shared across the package."""


class WavebusError(Exception):
    """Base class for all wavebus errors."""


class ConfigurationError(WavebusError, ValueError):
    """A scenario, geometry, carrier set, or timing plan violates a validity rule."""


class UsageError(WavebusError, ValueError):
    """An operation was invoked with arguments outside its contract."""
