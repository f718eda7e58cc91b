"""Exception types shared across the package.

Precondition violations (bad inputs, contracts that a caller can check up
front) all derive from PreconditionError so the CLI can map them to exit
code 1, while genuine internal failures surface as RuntimeError subclasses
and map to exit code 2.
"""


class PreconditionError(ValueError):
    """An operation was called outside its stated domain."""


class NotAPGFError(PreconditionError):
    """Coefficients cannot be normalized into a probability generating function."""


class SpanMismatchError(PreconditionError):
    """Binary operation on distributions with unequal lattice spans."""


class DegenerateDistributionError(PreconditionError):
    """Operation requires positive variance but the distribution is a point mass."""


class RootAtOneError(PreconditionError):
    """A root at z = 1 makes the log-potential singular at the expansion point."""


class InapplicableCheckError(PreconditionError):
    """A conditional check's hypotheses do not hold; the check is neither pass nor fail."""


class EvaluationAtRootError(PreconditionError):
    """A difference of potentials was requested at a zero of the polynomial."""


class RootFindingError(RuntimeError):
    """Root polishing failed to converge; carries the best iterate found."""

    def __init__(self, message, best_roots=None):
        super().__init__(message)
        self.best_roots = best_roots


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, achieved_tol=None):
        super().__init__(message)
        self.achieved_tol = achieved_tol
