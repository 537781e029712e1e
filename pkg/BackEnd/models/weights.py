"""Exact facet weights.

Weights are ``fractions.Fraction`` values. Documents carry them as integers or
``"p/q"`` strings; floating-point literals are refused so that width
comparisons stay exact.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Any, Iterable

from BackEnd.models.errors import SchemaError

Weight = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_weight(raw: Any, where: str = "weight") -> Fraction:
    """Turn a document value into a non-negative exact weight.

    Args:
        raw: an ``int``, a ``Fraction`` or a ``"p"`` / ``"p/q"`` string.
        where: label used in the error message.

    Raises:
        SchemaError: for floats, booleans, malformed strings and negative values.
    """
    if isinstance(raw, bool):
        raise SchemaError(f"{where}: booleans are not weights", details={"value": raw})
    if isinstance(raw, float):
        raise SchemaError(
            f"{where}: non-exact numeric literal {raw!r}; write it as a \"p/q\" string",
            details={"value": raw},
        )
    if isinstance(raw, Fraction):
        value = raw
    elif isinstance(raw, int):
        value = Fraction(raw)
    elif isinstance(raw, str):
        match = _RATIONAL_RE.match(raw)
        if not match:
            raise SchemaError(f"{where}: cannot read {raw!r} as an exact rational", details={"value": raw})
        numerator, denominator = match.group(1), match.group(2)
        if denominator is not None and int(denominator) == 0:
            raise SchemaError(f"{where}: zero denominator in {raw!r}", details={"value": raw})
        value = Fraction(int(numerator), int(denominator or 1))
    else:
        raise SchemaError(f"{where}: unsupported weight type {type(raw).__name__}", details={"value": raw})

    if value < 0:
        raise SchemaError(f"{where}: negative weight {format_weight(value)}", details={"value": raw})
    return value


def format_weight(value: Fraction) -> str:
    """Serialize a weight as ``"p"`` or ``"p/q"``."""
    return str(Fraction(value))


def format_weights(values: Iterable[Fraction]) -> list[str]:
    return [format_weight(v) for v in values]


def total(values: Iterable[Fraction]) -> Fraction:
    """Exact sum of weights as a Fraction."""
    result = ZERO
    for value in values:
        result += value
    return result
