"""
Error types raised by the toolkit services.

Every error derives from ValueError so callers that only know about bad
input keep working; the CLI maps all of them to exit code 2.
"""
from typing import Optional, Tuple


class FkgLabError(ValueError):
    """Base class for all toolkit errors"""


class DimensionMismatchError(FkgLabError):
    def __init__(self, left: int, right: int):
        super().__init__(f"dimension mismatch: {left} != {right}")
        self.left = left
        self.right = right


class CapacityError(FkgLabError):
    """An input exceeds an exhaustive-enumeration limit"""

    def __init__(self, what: str, value: int, limit: int, hint: Optional[str] = None):
        message = f"{what} = {value} exceeds the capacity limit {limit}"
        if hint:
            message = f"{message}; {hint}"
        super().__init__(message)
        self.what = what
        self.value = value
        self.limit = limit


class InvalidRationalError(FkgLabError):
    pass


class InvalidMeasureError(FkgLabError):
    pass


class InvalidPartitionError(FkgLabError):
    """A labeling is not total or some A ∪ C_i is not closed upwards"""

    def __init__(self, message: str, block: Optional[str] = None,
                 witness: Optional[Tuple[str, str]] = None):
        if witness is not None:
            message = f"{message} (witness: {witness[0]} in block, {witness[1]} missing)"
        super().__init__(message)
        self.block = block
        self.witness = witness


class ZeroMassConditionError(FkgLabError):
    pass


class NotProductMeasureError(FkgLabError):
    pass


class IllegalFiberError(FkgLabError):
    def __init__(self, point: str, lower: str, upper: str):
        super().__init__(f"illegal fiber over {point!r}: labels ({lower}, {upper})")
        self.point = point
        self.lower = lower
        self.upper = upper


class RealizationError(FkgLabError):
    pass


class InvalidGraphError(FkgLabError):
    pass
