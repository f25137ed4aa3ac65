"""Exception types shared across the package."""


class IllposedError(Exception):
    """Base class for all package errors."""


class UnresolvedShell(IllposedError):
    """A dyadic shell extends past the grid's resolvable frequency range."""


class ShockTooClose(IllposedError):
    """Characteristic map is too close to folding for a reliable inversion."""


class NewtonDivergence(IllposedError):
    """Flow-map inversion failed to converge even with the bisection fallback."""


class CFLViolation(IllposedError):
    """Requested time step exceeds the explicit stability limit."""


class NonDivergenceFree(IllposedError):
    """A vector field required to be divergence-free is not."""


class DegenerateFit(IllposedError):
    """Order fit requested on too few or degenerate data points."""


class ConfigError(IllposedError):
    """Configuration file or override could not be parsed or validated."""
