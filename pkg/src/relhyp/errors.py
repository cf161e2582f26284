"""Exception hierarchy and the tri-valued answer type."""

import enum


class Tri(enum.Enum):
    YES = "Yes"
    NO = "No"
    UNKNOWN = "Unknown"

    def __bool__(self):
        raise TypeError("Tri is not a bool; compare against Tri.YES explicitly")

    def __str__(self):
        return self.value


class RelHypError(Exception):
    """Base class for every error raised by the package."""


class SpecError(RelHypError):
    pass


class InvalidTable(SpecError):
    pass


class NonSymmetricSystem(SpecError):
    pass


class TrivialFactor(SpecError):
    pass


class RelatorsNotClosed(SpecError):
    pass


class BackendMismatch(RelHypError):
    pass


class ConeVertexInPlainGraph(RelHypError):
    pass


class ExplorationBudgetExceeded(RelHypError):
    pass


class BudgetExceeded(RelHypError):
    pass


class NotWithinCap(RelHypError):
    pass


class CosetKeyUnknown(RelHypError):
    pass


class DanglingConeEdge(RelHypError):
    pass


class ZeroBiedge(RelHypError):
    pass


class YNotReduced(RelHypError):
    pass


class SameCoset(RelHypError):
    pass


class EnumerationTruncated(RelHypError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class GeodesicEnumerationTruncated(RelHypError):
    pass


class GenerationFailure(RelHypError):
    pass


class AreaCapExceeded(RelHypError):
    pass


class NotTrivialWithinBudget(RelHypError):
    pass


class ReplacementNotFound(RelHypError):
    pass
