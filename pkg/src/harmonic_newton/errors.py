"""Exception hierarchy.

Everything numerical derives from :class:`HarmonicNewtonError` so the CLI can
map it to a single exit code.
"""


class HarmonicNewtonError(ValueError):
    """Base class for numerical failures raised by this package."""


class EvaluationError(HarmonicNewtonError):
    """An evaluator produced a non-finite value where a finite one is required."""


class NoUniqueSolution(HarmonicNewtonError):
    pass


class DegenerateConstant(HarmonicNewtonError):
    pass


class NotSingularZero(HarmonicNewtonError):
    pass


class SeedBranchError(HarmonicNewtonError):
    pass


class MissingDerivative(HarmonicNewtonError):
    pass
