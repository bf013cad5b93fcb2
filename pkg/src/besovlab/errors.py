"""Exception types shared across the package."""


class BesovLabError(Exception):
    """Base class for all package-specific errors."""


class InvalidField(BesovLabError):
    """A field contains NaN or Inf samples."""


class NonRealSpectrum(BesovLabError):
    """Spectral data violates the Hermitian symmetry of a real function."""


class DecayViolation(BesovLabError):
    """A profile does not decay below the truncation tolerance at |x| >= L/2."""


class ResolutionExceeded(BesovLabError):
    """Requested construction needs frequencies the grid cannot resolve."""


class BlowUp(BesovLabError):
    """Slope of the evolving solution exceeded the wave-breaking threshold."""

    def __init__(self, time: float, slope: float):
        super().__init__(f"slope {slope:.3e} exceeded blow-up threshold at t={time:.6f}")
        self.time = time
        self.slope = slope
