"""Exception types shared across the package."""


class UsageError(ValueError):
    """Invalid arguments or configuration supplied by the caller."""


class CapabilityError(RuntimeError):
    """Request is outside what this implementation can compute."""


class EstimationError(RuntimeError):
    """A fitting routine failed to produce a usable estimate."""


class ThresholdTooLowError(EstimationError):
    """Tail-form censored likelihood needs V at the threshold below one."""
