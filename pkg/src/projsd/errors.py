"""Exception hierarchy shared by all solver components."""


class ProjSDError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(ProjSDError, ValueError):
    """Vector length does not match the space dimension."""


class NonConvergence(ProjSDError):
    """An inner numerical minimizer failed to reach its tolerance.

    Usually signals a misconfigured geometry rather than a genuinely
    hard projection problem.
    """


class EtaTooLarge(ProjSDError):
    """The noise level violates ``8 * ctilde * eta < 1``."""


class LinearCaseUnbounded(ProjSDError):
    """Convergence radius is infinite because the curvature constant is zero.

    Callers may treat any starting point as admissible.
    """


class NonpositiveU(ProjSDError):
    """Step-size numerator became nonpositive.

    The theoretical preconditions are violated: either the starting point
    lies outside the convergence radius or the noise level is too large.
    """


class ZeroGradient(ProjSDError):
    """Gradient vanished while the residual is still above the threshold."""


class DegenerateSet(ProjSDError):
    """All sampled pairs were skipped during constant estimation."""


class NoSuchLevel(ProjSDError):
    """The approximation-error sequence never reaches the target accuracy."""


class TransitionInvalid(ProjSDError):
    """A multi-level schedule failed its neighbor-pair validation."""


class TauOutOfRange(ProjSDError, ValueError):
    """Derivative-Lipschitz scale outside its admissible interval."""


class LambdaTooSmall(ProjSDError, ValueError):
    """Approximation-error scale too small relative to the target residual."""


class SchemaError(ProjSDError):
    """Configuration document failed validation.

    Carries the full list of error messages, not just the first.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
