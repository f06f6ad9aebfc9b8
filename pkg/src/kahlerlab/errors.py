"""Exception types raised by the library and mapped to CLI exit codes."""


class KahlerLabError(Exception):
    """Base class for all library errors."""


class InvalidInput(KahlerLabError, ValueError):
    """Malformed or geometrically inadmissible input data."""


class EinsteinInput(KahlerLabError):
    """Ricci endomorphism has a single eigenvalue; no two-eigenvalue split exists."""


class TooManyEigenvalues(KahlerLabError):
    """Ricci endomorphism has three or more distinct eigenvalues."""


class NotSameSign(KahlerLabError):
    """The Einstein correspondence needs eigenvalues with lambda * mu > 0."""


class HypothesisFailed(KahlerLabError):
    """The half-root space required to vanish by the closed-form construction is nonzero."""

    def __init__(self, message, root_space_dim=None):
        super().__init__(message)
        self.root_space_dim = root_space_dim


class StructuralError(KahlerLabError):
    """The ad(a)-action on the nilradical is not simultaneously diagonalizable."""
