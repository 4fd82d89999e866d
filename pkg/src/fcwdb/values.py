"""Value domain for table cells and index keys.

Cells hold one of: 64-bit signed integer, exact decimal with two fractional
digits (currency), text, timestamp (microseconds since epoch, stored as int),
or null (Python None). Currency never touches binary floating point; the
`decimal` module does the arithmetic and `money()` pins the 2-digit scale.

Keys are tuples of cell values. Ordering is lexicographic with null sorting
before any value; comparing values of different kinds is a usage error and
surfaces as TypeError from the underlying comparison.
"""

import enum
from decimal import Decimal

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

TWO_PLACES = Decimal("0.01")


class ValueKind(enum.Enum):
    INTEGER = "integer"
    DECIMAL = "decimal"
    TEXT = "text"
    TIMESTAMP = "timestamp"


def money(x) -> Decimal:
    """Exact 2-fractional-digit decimal from an int, str or Decimal."""
    if isinstance(x, float):
        raise TypeError("refusing float for currency; pass str/int/Decimal")
    return Decimal(x).quantize(TWO_PLACES)


def check_value(kind: ValueKind, value, nullable: bool):
    """Validate one cell against its declared kind; returns the value."""
    if value is None:
        if not nullable:
            raise TypeError(f"null not allowed for non-nullable {kind.value} column")
        return None
    if kind is ValueKind.INTEGER or kind is ValueKind.TIMESTAMP:
        if type(value) is not int:
            raise TypeError(f"expected int for {kind.value}, got {type(value).__name__}")
        if not (INT64_MIN <= value <= INT64_MAX):
            raise TypeError(f"{kind.value} out of 64-bit range: {value}")
    elif kind is ValueKind.DECIMAL:
        if not isinstance(value, Decimal):
            raise TypeError(f"expected Decimal, got {type(value).__name__}")
        if value != value.quantize(TWO_PLACES):
            raise TypeError(f"decimal {value} has more than 2 fractional digits")
        return value.quantize(TWO_PLACES)
    elif kind is ValueKind.TEXT:
        if not isinstance(value, str):
            raise TypeError(f"expected str, got {type(value).__name__}")
    else:  # pragma: no cover - exhaustive over ValueKind
        raise TypeError(f"unknown kind {kind}")
    return value


class _Extreme:
    """Totally ordered sentinel; used for null-first ordering and open bounds."""

    __slots__ = ("_rank", "_name")

    def __init__(self, rank, name):
        self._rank = rank  # -1 sorts below everything, +1 above
        self._name = name

    def __lt__(self, other):
        if other is self:
            return False
        return self._rank < 0

    def __gt__(self, other):
        if other is self:
            return False
        return self._rank > 0

    def __le__(self, other):
        return self is other or self._rank < 0

    def __ge__(self, other):
        return self is other or self._rank > 0

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return object.__hash__(self)

    def __repr__(self):
        return self._name


#: Sorts below every value. Stands in for null inside stored keys, and may be
#: used in range bounds ("from the start of this prefix").
NULL_FIRST = _Extreme(-1, "NULL_FIRST")

#: Sorts above every value; only meaningful inside range bounds, e.g.
#: ``hi=(w, d, POS_INF)`` to scan everything under the (w, d) prefix.
POS_INF = _Extreme(+1, "POS_INF")

#: Alias with the matching name for lower bounds.
NEG_INF = NULL_FIRST


def encode_key(key: tuple) -> tuple:
    """Replace None elements with the NULL_FIRST sentinel so tuples compare."""
    if None in key:
        return tuple(NULL_FIRST if v is None else v for v in key)
    return key


def decode_key(key: tuple) -> tuple:
    if NULL_FIRST in key:
        return tuple(None if v is NULL_FIRST else v for v in key)
    return key


def encode_json_value(kind: ValueKind, value):
    """Lossless JSON image of a cell: decimals travel as strings."""
    if value is None:
        return None
    if kind is ValueKind.DECIMAL:
        return str(value)
    return value


def decode_json_value(kind: ValueKind, raw):
    if raw is None:
        return None
    if kind is ValueKind.DECIMAL:
        return money(raw)
    if kind in (ValueKind.INTEGER, ValueKind.TIMESTAMP):
        if type(raw) is not int:
            raise ValueError(f"expected integer, got {raw!r}")
        return raw
    if not isinstance(raw, str):
        raise ValueError(f"expected string, got {raw!r}")
    return raw
