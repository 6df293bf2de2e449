"""Exception hierarchy. Every error carries an optional ``witness``."""


class PosetCStarError(Exception):
    def __init__(self, message="", witness=None):
        super().__init__(message)
        self.witness = witness


# poset_core
class CycleError(PosetCStarError, ValueError):
    pass


class UnknownElement(PosetCStarError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class SizeLimit(PosetCStarError):
    pass


# index_topology
class ChainUnavailable(PosetCStarError):
    pass


# rational_semigroup
class NegativeInput(PosetCStarError, ValueError):
    pass


class OverflowGuard(PosetCStarError, OverflowError):
    pass


class LevelMismatch(PosetCStarError, ValueError):
    pass


# toeplitz_ops
class DegreeOverflow(PosetCStarError, ValueError):
    pass


class NonConvergence(PosetCStarError, ArithmeticError):
    pass


class DimensionMismatch(PosetCStarError, ValueError):
    pass


# inductive_systems
class StageOrderError(PosetCStarError, ValueError):
    pass


class IncompatibleCocone(PosetCStarError):
    pass


# embedding
class EmptyDomain(PosetCStarError, ValueError):
    pass


class NotSubset(PosetCStarError, ValueError):
    pass


class ChainTooShort(PosetCStarError, ValueError):
    pass


class DepthExceeded(PosetCStarError, ValueError):
    pass


class CofinalityFailure(PosetCStarError):
    pass
