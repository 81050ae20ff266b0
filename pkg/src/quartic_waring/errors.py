"""Exception hierarchy shared by every module."""


class WaringError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateInput(WaringError):
    pass


class DegreeMismatch(WaringError):
    pass


class BadDegree(WaringError):
    pass


class ZeroForm(WaringError):
    pass


class DimensionCollapse(WaringError):
    """The plane handed to a classifier is not three-dimensional."""


class ClassificationError(WaringError):
    """Determinant data does not fit any admissible configuration."""


class SearchExhausted(WaringError):
    pass


class MembershipFailure(WaringError):
    """The form is not in the span of the splitting subspaces."""


class HypothesisViolation(WaringError):
    """A nondegeneracy contraction required by the special-case route vanishes."""

    def __init__(self, msg, operator=None):
        super().__init__(msg)
        self.operator = operator


class CaseAnalysisExhausted(WaringError):
    def __init__(self, msg, diagnostics=None):
        super().__init__(msg)
        self.diagnostics = diagnostics or {}


class DecompositionFailure(WaringError):
    def __init__(self, msg, diagnostics=None):
        super().__init__(msg)
        self.diagnostics = diagnostics or {}


class ParseError(WaringError):
    def __init__(self, msg, position=None):
        if position is not None:
            msg = f"at position {position}: {msg}"
        super().__init__(msg)
        self.position = position


class InhomogeneousError(ParseError):
    pass
