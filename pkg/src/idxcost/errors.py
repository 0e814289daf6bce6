"""Exception hierarchy shared by every stage of the pipeline."""


class IdxCostError(Exception):
    """Base class for all errors raised by idxcost."""


class ParseError(IdxCostError):
    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{line}:{col}: {message}"
        super().__init__(message)


class InvalidComposition(IdxCostError):
    """Two simple expressions over different indexes were combined."""


class InvalidComparison(IdxCostError):
    pass


class IndexOutOfScope(IdxCostError):
    """A reindexing targeted an index outside a label's indexing domain."""


class UndefinedEvaluation(IdxCostError):
    """A label evaluated against a constant indexing is not constant."""


class StuckEvaluation(UndefinedEvaluation):
    """Execution reached a label that cannot be instantiated."""


class ArithmeticOverflow(IdxCostError):
    pass


class FuelExhausted(IdxCostError):
    def __init__(self, steps):
        self.steps = steps
        super().__init__(f"fuel exhausted after {steps} steps")


class AlreadyLabelled(IdxCostError):
    pass


class NotSourceLabelled(IdxCostError):
    """Indexed instrumentation needs identity indexings everywhere."""


class BadPath(IdxCostError):
    pass


class InvalidFactor(IdxCostError):
    pass


class ScriptError(IdxCostError):
    def __init__(self, step, cause):
        self.step = step
        self.cause = cause
        super().__init__(f"step {step}: {cause}")


class SoundnessError(IdxCostError):
    """The control-flow graph has a cycle that crosses no cost label."""


class PrecisenessError(IdxCostError):
    """Strict mode found a label whose block cost depends on the path."""


class IncompleteCostMap(IdxCostError):
    pass


class UndefinedCondition(IdxCostError):
    pass


class MissingCost(IdxCostError):
    pass


class ModuloByZero(ArithmeticOverflow):
    pass
