"""Exception hierarchy shared by every module."""


class SkewflowError(Exception):
    pass


class DomainError(SkewflowError, ValueError):
    """An argument lies outside the mathematical domain (e.g. t < s)."""


class ContractError(SkewflowError, ValueError):
    """A caller broke an interface contract (dimension mismatch, bad ordering)."""


class CocycleOverflowError(SkewflowError, FloatingPointError):
    """A matrix-valued cocycle could not be evaluated in floating point."""
