"""Exception types shared across the package."""


class TunnelTimesError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(TunnelTimesError, ValueError):
    """An argument is outside the physical or numerical domain of an operation."""


class OverBarrierComponent(DomainError):
    """A spectral component has kinetic energy at or above the barrier height."""


class ConfigError(TunnelTimesError, ValueError):
    """A scenario configuration is malformed or inconsistent."""


class WindowTooNarrow(TunnelTimesError):
    """The time window does not cover the packet passage at the probed position."""


class UnreliableStatistic(TunnelTimesError):
    """A flux norm is too small for its time statistics to be trusted."""


class NumericalError(TunnelTimesError):
    """A computation produced a numerically inconsistent result."""
