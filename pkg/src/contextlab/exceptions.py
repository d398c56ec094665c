"""Exception types raised by contextlab."""


class ContextLabError(Exception):
    """Base class for all library errors."""


class NotUnitaryError(ContextLabError, ValueError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class NotHermitianError(ContextLabError, ValueError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class ConvergenceError(ContextLabError, RuntimeError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class ClusteringAmbiguityError(ContextLabError, ValueError):
    """Two eigenvalue clusters sit too close to decide whether they are one."""

    def __init__(self, message, separation):
        super().__init__(message)
        self.residual = separation


class PairingError(ContextLabError, ValueError):
    """The spectrum of a unitary is not closed under negation with equal multiplicities.

    Carries the :class:`~contextlab.spectral.PairingVerdict` that failed.
    """

    def __init__(self, verdict):
        super().__init__(f"no anti-commuting partner exists: {verdict.defect}")
        self.verdict = verdict
        self.residual = None


class AntiCommutationError(ContextLabError, ValueError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class RefusalError(ContextLabError, ValueError):
    """A catalog generator was asked for parameters that cannot give a valid square."""

    def __init__(self, message, verdict=None, residual=None):
        super().__init__(message)
        self.verdict = verdict
        self.residual = residual
