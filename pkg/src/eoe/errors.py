"""Exception types shared across the package."""


class UnsupportedClosedFormError(ValueError):
    """A closed-form transform was requested where none exists (e.g. odd ring)."""


class NoAbsorptionError(ValueError):
    """The meeting chain does not absorb almost surely; the transform solve is singular."""


class NumericDegeneracyError(ArithmeticError):
    """A transform ratio came out with a non-positive denominator."""


class MomentDivergenceError(ArithmeticError):
    """Numerical differentiation of a transform failed to converge; a moment may be infinite."""


class StateSpaceTooLargeError(ValueError):
    """Exact oracle state space exceeds the configured cap."""


class RunawaySimulationError(RuntimeError):
    """A single replication exceeded the event-count safety cap."""


class ScheduleRegimeError(ValueError):
    """A scaling schedule violates its regime conditions on the supplied n-grid."""


class ConfigError(ValueError):
    """Invalid or unknown experiment configuration key/value."""
