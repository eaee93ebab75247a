"""Exception types shared across the package.

Every failure mode that callers can reasonably branch on gets its own
class; everything inherits from DysonflowError so `except DysonflowError`
catches all library-raised conditions without swallowing genuine bugs
(TypeError, AttributeError and friends stay untouched).
"""


class DysonflowError(Exception):
    """Base class for all library-raised errors."""


class DomainError(DysonflowError):
    """Input lies outside the mathematical domain of the operation.

    Examples: evaluation point on a branch cut, negative time for a
    diffusion that only runs forward, point on the real axis where a
    boundary-value function is discontinuous.
    """


class PreconditionError(DysonflowError):
    """Arguments are individually valid but jointly inconsistent.

    Examples: matrix dimension incompatible with a source multiplicity
    list, odd dimension where a symmetric two-source construction needs
    an even one.
    """


class ConvergenceError(DysonflowError):
    """An iterative or adaptive procedure failed to reach its target.

    Carries the best estimate and the achieved error when available so
    callers can decide whether the partial answer is still usable.
    """

    def __init__(self, message, best=None, achieved=None):
        super().__init__(message)
        self.best = best
        self.achieved = achieved


class ConfigurationError(DysonflowError):
    """Malformed user configuration (CLI flags, config files, specs)."""


class BranchAmbiguityError(DysonflowError):
    """A multivalued map could not be resolved to a single branch.

    Raised when characteristic tracking detects a collision between
    candidate roots, or when a limit point sits exactly on a caustic
    where two branches coalesce. Carries both colliding candidates so
    callers can pick one deliberately.
    """

    def __init__(self, message, candidates=None):
        super().__init__(message)
        self.candidates = candidates
