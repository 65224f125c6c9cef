"""Exception types shared across the package."""


class ShearWittError(Exception):
    """Base class for all errors raised by this package."""


class AxiomViolation(ShearWittError):
    def __init__(self, axiom, witness=None):
        self.axiom = axiom
        self.witness = witness
        super().__init__(f"{axiom} fails at {witness!r}")


class NotPNilpotent(ShearWittError):
    pass


class ParentMismatch(ShearWittError):
    pass


class BudgetExceeded(ShearWittError):
    def __init__(self, needed, budget):
        self.needed = needed
        self.budget = budget
        super().__init__(f"enumeration of {needed} elements exceeds budget {budget}")


class CharMismatch(ShearWittError):
    pass


class IntegralityFailure(ShearWittError):
    pass


class LevelTooLarge(ShearWittError):
    pass


class LevelMismatch(ShearWittError):
    pass


class CorruptCache(ShearWittError):
    def __init__(self, family, i, detail=""):
        self.family = family
        self.i = i
        super().__init__(f"CorruptCache({family},{i}) {detail}".strip())


class CacheMissing(ShearWittError):
    pass


class ShiftFailure(ShearWittError):
    pass


class NoStabilization(ShearWittError):
    pass


class NotInHatW(ShearWittError):
    pass


class NotAdmissible(ShearWittError):
    pass


class DecompositionFailure(ShearWittError):
    pass


class DepthExhausted(ShearWittError):
    pass


class NotAChainMap(ShearWittError):
    def __init__(self, where, witness=None):
        self.where = where
        self.witness = witness
        super().__init__(f"not a chain map ({where}) at {witness!r}")


class DeltaPViolation(ShearWittError):
    pass


class NotAUnit(ShearWittError):
    pass


class ConfigError(ShearWittError):
    pass


class ParseError(ShearWittError):
    pass
