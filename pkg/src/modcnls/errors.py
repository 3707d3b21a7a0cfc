"""Exception types shared across the package.

Plain ValueError is used for scalar domain errors (bad function arguments);
the classes here mark conditions that callers are expected to branch on,
in particular the CLI exit-code mapping.
"""


class ValidationError(ValueError):
    """A configuration or precondition check failed before any work was done."""


class LatticeTooCoarseError(ValidationError):
    """A residual lattice is below the minimum resolution for finite differences."""


class VerificationError(RuntimeError):
    """A residual or invariant check ran to completion and exceeded its tolerance."""


class DarkBackgroundError(RuntimeError):
    """Split-step propagation was requested for a field with a nondecaying
    background, which the periodic spectral transform cannot represent.
    Pass the explicit override to proceed anyway."""


class DivergenceError(RuntimeError):
    """The propagated field stopped being finite."""

    def __init__(self, t, message=None):
        self.t = t
        super().__init__(message or f"field became non-finite at t={t:.6g}")
