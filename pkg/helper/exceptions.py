"""
Error hierarchy shared by all toolkit packages
"""
from typing import Optional


class ToolkitError(Exception):
    """Base class for every error raised by the toolkit"""


class LatticeMismatchError(ToolkitError):
    def __init__(self, detail: str = ""):
        super().__init__(f"lattice mismatch{': ' + detail if detail else ''}")


class UnstructuredCoefficientsError(ToolkitError):
    def __init__(self, detail: str = ""):
        super().__init__(f"unstructured coefficients{': ' + detail if detail else ''}")


class MissingLedgerError(ToolkitError):
    def __init__(self, detail: str = ""):
        super().__init__(f"missing ledger{': ' + detail if detail else ''}")


class NonAscendingGeneratorError(ToolkitError):
    def __init__(self, degree: int):
        super().__init__(f"non-ascending generator: minimal degree {degree} <= 2")


class SmallDivisorUnderflowError(ToolkitError):
    def __init__(self, term: str, divisor: float):
        super().__init__(f"numerical small divisor underflow at {term} (divisor {divisor:.3e})")


class TransformDomainError(ToolkitError):
    def __init__(self, detail: str = ""):
        super().__init__(f"transform out of domain{': ' + detail if detail else ''}")


class EnumerationBudgetError(ToolkitError):
    def __init__(self, needed: int, budget: int):
        self.needed = needed
        self.budget = budget
        super().__init__(f"enumeration budget exceeded: {needed} candidates > budget {budget}")


class IntegratorConvergenceError(ToolkitError):
    """Fixed-point iteration failed even after the allowed step halvings"""


class DegenerateLadderError(ToolkitError):
    """Norm ladder unusable for a scaling fit"""


class ConfigError(ToolkitError):
    """Invalid experiment configuration; `field` points at the offending entry"""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class CheckFailedError(ToolkitError):
    """A verification check ran to completion and failed"""
