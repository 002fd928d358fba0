"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input violates a documented precondition or invariant."""


class FrequencyBandError(DomainError):
    """Frequency outside the dielectric model's validity band; no extrapolation."""


class ScenarioError(ValueError):
    """A scenario cannot be simulated as configured."""


class ContractViolation(RuntimeError):
    """Internal contract broken (e.g. mixed spreading factors in one collision pass)."""


class ConfigError(ValueError):
    """Experiment configuration file or overrides are invalid."""


class CalibrationInfeasibleError(RuntimeError):
    """No overhead value can reach the requested anchor lifetime."""

    def __init__(self, message, lo=None, hi=None, lifetime_lo=None, lifetime_hi=None):
        super().__init__(message)
        self.lo = lo
        self.hi = hi
        self.lifetime_lo = lifetime_lo
        self.lifetime_hi = lifetime_hi
