"""Exception types shared across the package."""


class PgisoError(Exception):
    """Base class; the CLI maps these to exit codes > 2."""


class ShapeMismatch(PgisoError):
    pass


class Singular(PgisoError):
    pass


class CapExceeded(PgisoError):
    pass


class BudgetExceeded(PgisoError):
    pass


class NotSkew(PgisoError):
    pass


class Infeasible(PgisoError):
    pass


class InvalidTuple(PgisoError):
    pass


class ConstructionFailed(PgisoError):
    pass


class InvalidForm(PgisoError):
    pass


class Ambiguous(PgisoError):
    pass


class NormalizationFailed(PgisoError):
    pass


class BoundsTooSmall(PgisoError):
    pass


class ParseError(PgisoError):
    pass


class NotAGroup(PgisoError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class NotPPower(PgisoError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class WrongExponent(PgisoError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class NotClass2(PgisoError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class Degenerate(PgisoError):
    pass


class Inconclusive(PgisoError):
    """The pipeline could not decide; carries the tensor-level decision."""

    def __init__(self, msg, decision=None):
        super().__init__(msg)
        self.decision = decision
