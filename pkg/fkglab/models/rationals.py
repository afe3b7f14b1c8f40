"""
Exact rational codec shared by every file format and report.

Rationals are written as "p/q" in lowest terms, or "p" when q = 1.
Floats are rejected: every verdict path stays exact.
"""
import re
from fractions import Fraction
from typing import Union

from fkglab.exceptions import InvalidRationalError

RationalLike = Union[Fraction, int, str]

_RATIONAL_PATTERN = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(value: RationalLike) -> Fraction:
    """Parse an int, a Fraction or a "p/q" string into a Fraction"""
    if isinstance(value, bool):
        raise InvalidRationalError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        match = _RATIONAL_PATTERN.match(value)
        if not match:
            raise InvalidRationalError(f"malformed rational {value!r}")
        numerator = int(match.group(1))
        denominator = int(match.group(2)) if match.group(2) is not None else 1
        if denominator == 0:
            raise InvalidRationalError(f"zero denominator in {value!r}")
        return Fraction(numerator, denominator)
    raise InvalidRationalError(f"unsupported rational type {type(value).__name__}: {value!r}")


def format_rational(value: Fraction) -> str:
    """Lowest-terms text form; Fraction already normalises"""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_decimal(value: Fraction, digits: int = 6) -> str:
    """Display-only decimal with `digits` significant digits"""
    return f"{float(value):.{digits}g}"
