"""Exception hierarchy shared by every module of the laboratory."""


class RicciDiscError(Exception):
    """Base class for all errors raised by the project."""


class ConfigError(RicciDiscError):
    """A parameter lies outside its documented domain, or a config key is unknown."""


class UsageError(RicciDiscError):
    """An operation was called with inputs of the wrong shape (too few snapshots, mismatched grids)."""


class DomainError(RicciDiscError):
    """A point or time lies outside the domain of the object being evaluated."""


class PreconditionError(RicciDiscError):
    """A numerical precondition failed, e.g. the curvature bound K <= -1 on initial data."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location or {}


class GenerationError(RicciDiscError):
    """A sample initial metric came out violating K <= -1."""


class SolverError(RicciDiscError):
    """The semi-implicit linear solve did not converge."""

    def __init__(self, message, residual=float("nan"), t=None):
        super().__init__(message)
        self.residual = residual
        self.t = t


class DivergenceError(RicciDiscError):
    """The solution left the representable range (non-finite or |u| above the divergence bound)."""

    def __init__(self, message, t=None, r=None, theta=None, value=None):
        super().__init__(message)
        self.t = t
        self.r = r
        self.theta = theta
        self.value = value


class ConstructionInvariantError(RicciDiscError):
    """The approximating flows failed to decrease in k beyond tolerance."""

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = violations or []


class ConvergenceError(RicciDiscError):
    """The exhaustion did not settle below limit_tol within the k schedule."""

    def __init__(self, message, history=None, result=None):
        super().__init__(message)
        self.history = history or []
        self.result = result


class HypothesisError(RicciDiscError):
    """A hypothesis of a comparison theorem failed numerically (distinct from a failed conclusion)."""

    def __init__(self, message, hypothesis, margin=float("nan")):
        super().__init__(message)
        self.hypothesis = hypothesis
        self.margin = margin


# Exit codes used by the command line
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_DIVERGENCE = 3


def exit_code_for(exc):
    """Map an exception to the CLI exit code."""
    if isinstance(exc, (ConfigError, UsageError, DomainError)):
        return EXIT_USAGE
    if isinstance(exc, (DivergenceError, SolverError)):
        return EXIT_DIVERGENCE
    return EXIT_CHECK_FAILED
