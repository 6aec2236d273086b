"""Exception hierarchy.

Errors fall in two families that the command line maps to exit codes:
``ValidationError`` (bad input or a violated mathematical precondition, exit 2)
and ``BudgetError`` (a search or enumeration guard tripped, exit 3).
"""


class MvkError(Exception):
    pass


class ValidationError(MvkError):
    """Input is malformed or violates a mathematical precondition."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = list(diagnostics or [])


class BudgetError(MvkError):
    pass


# ring
class NameClash(ValidationError):
    pass


class GradeBelowDimension(ValidationError):
    pass


class InvalidBlowup(ValidationError):
    pass


class NotHomogeneous(ValidationError):
    pass


class AmbiguousComponents(ValidationError):
    pass


# labels
class LabelConflict(ValidationError):
    pass


class SearchBudget(BudgetError):
    pass


# cones
class NotSharp(ValidationError):
    pass


class InvalidRay(ValidationError):
    pass


class NoStratumCone(ValidationError):
    pass


class SizeBudget(BudgetError):
    pass


# strata
class NoComponents(ValidationError):
    pass


class PosetCycle(ValidationError):
    pass


class CodimNotMonotone(ValidationError):
    pass


class IntervalConditionFailed(ValidationError):
    pass


class StarConditionFailed(ValidationError):
    pass


class NerveInconsistent(ValidationError):
    pass


class UnknownStratum(ValidationError):
    pass


# volume
class InvariantViolation(MvkError):
    """Two routes to the same quantity disagreed; indicates a bug, not bad input."""


class UnlabeledStratum(ValidationError):
    pass


class NotSmoothModel(ValidationError):
    pass


# equivariant
class MissingCover(ValidationError):
    pass


class SchemaError(ValidationError):
    pass
