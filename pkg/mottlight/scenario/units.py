"""Unit grammar for scenario values.

Every dimensioned value is written with its unit and converted to SI base
units, with frequencies always angular (rad/s):

    27 kHz           -> 2 pi x 27e3 rad/s
    2pi*27 kHz       -> same value; the 2pi prefix is cosmetic on Hz forms
    2pi*27 krad/s    -> same value; on rad/s forms the prefix multiplies
    436 ms, 8.6 um, 2.3 W/cm2

Lists are comma separated with a unit on every item.
"""

import math
import re
from enum import Enum
from typing import Optional, Tuple

TWO_PI = 2.0 * math.pi


class Dimension(str, Enum):
    ANGULAR_FREQUENCY = "angular frequency"
    TIME = "time"
    LENGTH = "length"
    INTENSITY = "intensity"
    DIMENSIONLESS = "dimensionless"
    INTEGER = "integer"


CYCLIC_UNITS = {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9}
ANGULAR_UNITS = {"rad/s": 1.0, "krad/s": 1e3, "Mrad/s": 1e6, "Grad/s": 1e9}
TIME_UNITS = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "μs": 1e-6, "ns": 1e-9}
LENGTH_UNITS = {"m": 1.0, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "μm": 1e-6, "nm": 1e-9}
INTENSITY_UNITS = {
    "W/m2": 1.0,
    "W/m^2": 1.0,
    "W/cm2": 1e4,
    "W/cm^2": 1e4,
    "mW/cm2": 10.0,
    "mW/cm^2": 10.0,
}

# Base unit written back by format_quantity
BASE_UNITS = {
    Dimension.ANGULAR_FREQUENCY: "rad/s",
    Dimension.TIME: "s",
    Dimension.LENGTH: "m",
    Dimension.INTENSITY: "W/m2",
}

_TWO_PI_PREFIX = re.compile(
    r"^\s*(?P<sign>[+-]?)\s*2\s*(?:\*\s*)?(?:pi|π)\s*[*×x]\s*", re.IGNORECASE
)
_QUANTITY = re.compile(
    r"^(?P<number>[+-]?(?:inf|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?))\s*(?P<unit>\S*)$"
)


def _split(text: str) -> Tuple[bool, float, str]:
    """(has 2pi prefix, number, unit) of a single quantity."""
    prefix = _TWO_PI_PREFIX.match(text)
    body = text[prefix.end():] if prefix else text
    match = _QUANTITY.match(body.strip())
    if match is None:
        raise ValueError(f"cannot read quantity '{text.strip()}'")
    number = float(match.group("number"))
    if prefix and prefix.group("sign") == "-":
        number = -number
    return prefix is not None, number, match.group("unit")


def _scaled(unit: str, table: dict, dimension: Dimension, text: str) -> float:
    if unit not in table:
        expected = ", ".join(table)
        raise ValueError(
            f"unit '{unit or '(none)'}' in '{text.strip()}' is not a {dimension.value} "
            f"unit (expected one of: {expected})"
        )
    return table[unit]


def parse_quantity(text: str, dimension: Dimension) -> float:
    """Convert one value with its unit to SI base units.

    Args:
        text: e.g. "2pi*27 kHz", "436 ms", "0.2"
        dimension: expected dimension

    Returns:
        float in rad/s, s, m, W/m^2, or the bare number

    Raises:
        ValueError: malformed number, missing or wrong unit
    """
    dimension = Dimension(dimension)
    two_pi, number, unit = _split(text)

    if dimension is Dimension.ANGULAR_FREQUENCY:
        if unit in CYCLIC_UNITS:
            return TWO_PI * number * CYCLIC_UNITS[unit]
        scale = _scaled(unit, ANGULAR_UNITS, dimension, text)
        return (TWO_PI if two_pi else 1.0) * number * scale

    if two_pi:
        raise ValueError(f"2pi prefix only applies to frequencies, got '{text.strip()}'")

    if dimension in (Dimension.DIMENSIONLESS, Dimension.INTEGER):
        if unit:
            raise ValueError(f"'{text.strip()}' must be a bare number, found unit '{unit}'")
        if dimension is Dimension.INTEGER:
            if not float(number).is_integer():
                raise ValueError(f"'{text.strip()}' must be an integer")
            return int(number)
        return number

    tables = {
        Dimension.TIME: TIME_UNITS,
        Dimension.LENGTH: LENGTH_UNITS,
        Dimension.INTENSITY: INTENSITY_UNITS,
    }
    return number * _scaled(unit, tables[dimension], dimension, text)


def parse_list(text: str, dimension: Dimension, length: Optional[int] = None) -> tuple:
    """Comma-separated quantities, each with its own unit."""
    items = [item for item in text.split(",") if item.strip()]
    if not items:
        raise ValueError("empty list")
    if length is not None and len(items) != length:
        raise ValueError(f"expected {length} values, got {len(items)}")
    return tuple(parse_quantity(item, dimension) for item in items)


def format_quantity(value, dimension: Dimension) -> str:
    """Exact text form of a base-unit value (repr keeps every bit)."""
    dimension = Dimension(dimension)
    if dimension is Dimension.INTEGER:
        return str(int(value))
    if dimension is Dimension.DIMENSIONLESS:
        return repr(float(value))
    return f"{float(value)!r} {BASE_UNITS[dimension]}"


def format_list(values, dimension: Dimension) -> str:
    return ", ".join(format_quantity(v, dimension) for v in values)
