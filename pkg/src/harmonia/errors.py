"""Exception types shared across the package."""


class HarmoniaError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(HarmoniaError):
    """A value violates a documented invariant; names the offending field."""

    def __init__(self, field: str, reason: str):
        self.field = field
        self.reason = reason
        super().__init__(f"{field}: {reason}")


class ParseError(HarmoniaError):
    """Input document could not be parsed at all."""


class CollisionSingularity(HarmoniaError):
    """A singular potential was evaluated at (or below) zero separation."""


class NonFiniteState(HarmoniaError):
    """Integration produced NaN or infinite coordinates."""


class CMNotAtOrigin(HarmoniaError):
    """Operation requires the center of mass at the origin."""


class DegenerateGradient(HarmoniaError):
    """The potential gradient vanishes, so the central-configuration
    multiplier cannot be determined."""


class NoConvergence(HarmoniaError):
    """Iterative refinement exhausted its iteration budget."""


class ZeroInertia(HarmoniaError):
    """Moment of inertia vanishes at the reference sample (total collision)."""
