"""Exception and warning types shared across the toolkit."""


class FleqError(Exception):
    """Base class for all toolkit errors."""


class InsufficientGridError(FleqError):
    """Grid too small for the requested stencil ("insufficient grid")."""


class SpectralOriginError(FleqError):
    """Spectral parameter at the origin, where eta = k - 1/(2k) blows up."""


class UnstableDirectionError(FleqError):
    """Requested Jost solve decays against its analyticity half-plane."""


class ResonanceError(FleqError):
    """a(k) vanishes on the continuous spectrum ("resonance encountered")."""


class VanishingCoefficientError(FleqError):
    """Division by vanishing a(k) in the reflection coefficient."""


class ZeroOnContourError(FleqError):
    """|a| below threshold on a winding contour ("zero on contour")."""


class WindingRefinementError(FleqError):
    """Contour phase accumulation failed to settle ("refinement failure")."""


class NewtonRefinementError(FleqError):
    """Newton iteration on a(k) stagnated ("refinement failed")."""


class ClusteredZerosError(FleqError):
    """Quad-tree subdivision could not isolate simple zeros."""


class NotAnEigenvalueError(FleqError):
    """Proportionality residual too large at the requested k ("not an eigenvalue")."""


class DegenerateSeedError(FleqError):
    """Bilinear form m_{k1}(eta, eta) vanishes somewhere on the grid."""


class DarbouxPoleError(FleqError):
    """Darboux matrix evaluated at k^2 = k1^2 ("pole of Darboux matrix")."""


class OffsetRequiredError(FleqError):
    """k too close to a removable singularity ("evaluate at offset")."""


class TruncationError(FleqError):
    """Output does not decay inside the truncated domain ("truncation violated")."""


class InputError(FleqError):
    """Malformed input file or configuration."""


class DecayToleranceWarning(UserWarning):
    """Potential does not decay below tolerance at the domain ends."""


class IllConditionedWarning(UserWarning):
    """Wronskian x-spread above the conditioning threshold."""


class TrivialTransformWarning(UserWarning):
    """Darboux anchor on the continuous spectrum; transformation trivializes."""


class NoZeroWarning(UserWarning):
    """remove_soliton applied where a(k1) does not vanish."""
