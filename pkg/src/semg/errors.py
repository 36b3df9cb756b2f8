"""Semantic exception hierarchy.

Every numeric failure mode has a named class so callers (and the CLI)
can map it to a stable error name instead of parsing messages.
"""


class SemgError(Exception):
    """Base class for all library errors."""


# --- distribution / table construction ---------------------------------

class EmptySupport(SemgError):
    pass


class NegativeMass(SemgError):
    pass


class SumOutOfTolerance(SemgError):
    pass


class DegenerateMarginal(SemgError):
    pass


class DimensionMismatch(SemgError):
    pass


class NonSquare(SemgError):
    pass


class GridSpecError(SemgError):
    pass


# --- semantic channel / Bayes machinery --------------------------------

class ZeroLogicalProbability(SemgError):
    pass


class ZeroPrior(SemgError):
    pass


class AllZeroChannel(SemgError):
    pass


class NonPositiveSigma(SemgError):
    pass


class NonPositiveSimilarity(SemgError):
    pass


class AllZeroRow(SemgError):
    pass


class NoTrueLabel(SemgError):
    pass


class ZeroCoverage(SemgError):
    pass


class EmptyGrid(SemgError):
    pass


class DegeneratePosterior(SemgError):
    pass


class DegenerateBoost(SemgError):
    pass


# --- iterative solvers ---------------------------------------------------

class NonPositiveModel(SemgError):
    pass


class NonConvergence(SemgError):
    """Fixed-point sweep hit its cap. Carries the last marginal defect."""

    def __init__(self, message, defect=None, partial=None):
        super().__init__(message)
        self.defect = defect
        self.partial = partial


class MaxIterExceeded(SemgError):
    """Iteration cap reached. ``partial`` holds whatever trace exists."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ComponentCollapse(SemgError):
    pass


# --- portfolio ------------------------------------------------------------

class RuinReturn(SemgError):
    pass


class UnboundedGrowth(SemgError):
    pass
