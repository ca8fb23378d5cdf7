"""Exception hierarchy."""


class RisError(Exception):
    """Base class for all package errors."""


class DomainError(RisError, ValueError):
    """An input lies outside the domain of an operation (f <= 0, C <= 0, ...)."""


class ResonanceSingularityError(RisError, ArithmeticError):
    """The impedance denominator vanished at an exact lossless resonance."""


class CalibrationRangeError(RisError, ValueError):
    """Angle outside the calibration table in strict mode."""


class EmptyTableError(RisError, ValueError):
    pass


class VoltageRangeError(DomainError):
    pass


class InfeasiblePhaseError(RisError):
    """Target phase is not reachable over the varactor capacitance range."""

    def __init__(self, message, target=None, phase_lo=None, phase_hi=None):
        super().__init__(message)
        self.target = target
        self.phase_lo = phase_lo
        self.phase_hi = phase_hi


class NonMonotoneError(RisError):
    """Phase is not monotone in capacitance, so bisection bracketing is invalid."""


class RealizationError(RisError):
    """Too many columns of a deflection design could not be realized."""

    def __init__(self, message, design=None):
        super().__init__(message)
        self.design = design


class UnstableExpansionError(DomainError):
    """First-order reverse-angle expansion requested too close to grazing."""


class ConfigError(RisError, ValueError):
    pass
