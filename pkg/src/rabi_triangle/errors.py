"""Exception types shared across the package."""


class RabiTriangleError(Exception):
    """Base class for all package errors."""


class DomainError(RabiTriangleError, ValueError):
    """Inputs outside the validity domain of a formula."""


class AmbiguousPhase(RabiTriangleError):
    """Point sits within tolerance of a phase boundary; caller decides the side."""


class GapClosed(RabiTriangleError):
    """Bogoliubov transform undefined at or past a gap closing."""


class OutsideFSP(RabiTriangleError):
    """Uniform displacement has no real solution at this coupling."""


class NoConvergence(RabiTriangleError):
    """Iterative solver failed; carries the best residual seen."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DynamicalInstability(RabiTriangleError):
    """Complex excitation energies: the quadratic form is not stable here."""


class StepTooLarge(RabiTriangleError):
    """Finite-difference re-solve failed at a shifted coupling."""


class ZeroVariance(RabiTriangleError):
    """Observable variance vanishes; inverted variance undefined."""


class DimensionTooLarge(RabiTriangleError):
    """Requested Fock space exceeds the configured memory budget."""


class DegenerateGroundState(RabiTriangleError):
    """Ground state degenerate within tolerance; fidelity derivative undefined."""


class InsufficientPoints(RabiTriangleError):
    """Not enough usable points in the requested fit window."""


class ConfigError(RabiTriangleError):
    """Malformed or incomplete run configuration."""
