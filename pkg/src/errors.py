"""Exception hierarchy shared by the library and the CLI.

Every error carries ``exit_code``: the CLI maps verification failures to 2
and everything else to 1.
"""

from typing import Any, Optional


class BlocksError(Exception):
    exit_code = 1


class ConfigError(BlocksError):
    """Parameter file or command line does not validate."""

    def __init__(self, message: str, key: Optional[str] = None):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


# --- verification failures (exit 2) ---


class VerificationFailure(BlocksError):
    exit_code = 2


class NegativeValuation(VerificationFailure):
    def __init__(self, where: Any, valuation: int):
        self.where = where
        self.valuation = valuation
        super().__init__(f"epsilon-valuation {valuation} < 0 at {where}")


class MismatchAtOrder(VerificationFailure):
    def __init__(self, order: int, difference: Any):
        self.order = order
        self.difference = difference
        super().__init__(f"mismatch at order {order}: difference {difference}")


class UnresolvedOrder(VerificationFailure):
    def __init__(self, order: int, reason: str = "coefficients not determined"):
        self.order = order
        super().__init__(f"order {order}: {reason}")


class ResidualTooLarge(VerificationFailure):
    def __init__(self, residual: Any, bound: Any):
        self.residual = residual
        self.bound = bound
        super().__init__(f"|residual| = {residual} exceeds {bound}")


# --- objects that do not exist at the given parameters (exit 1) ---


class MathError(BlocksError):
    pass


class CellOutOfDiagram(MathError, ValueError):
    pass


class PrefactorMismatch(MathError):
    pass


class ZeroLeadingCoefficient(MathError):
    pass


class EvaluationAtZero(MathError):
    pass


class PrecisionUnderflow(MathError):
    pass


class IncompatibleKinds(MathError):
    pass


class SingularModule(MathError):
    def __init__(self, message: str, level: Optional[int] = None):
        self.level = level
        super().__init__(message if level is None else f"level {level}: {message}")


class ZeroTopWeight(MathError):
    pass


class InsufficientOrder(MathError):
    pass


class ZeroDenominator(MathError):
    def __init__(self, cell: Any, factor: str):
        self.cell = cell
        super().__init__(f"zero {factor} at cell {cell}")


class GammaPole(MathError):
    def __init__(self, argument: Any):
        self.argument = argument
        super().__init__(f"Gamma pole at argument {argument}")


class SingularPairing(MathError):
    pass


class TauVanishes(MathError):
    pass


class PastOptimalTruncation(MathError):
    def __init__(self, order: int, smallest: int):
        self.order = order
        self.smallest = smallest
        super().__init__(
            f"order {order} is past the smallest term (index {smallest}); pass force=True to evaluate anyway"
        )
