"""Parsing of dimensional quantities such as ``"500 nm"`` or ``"1.17 g/cm^3"``.

Everything is converted to base SI on input. Only the handful of units the
device description needs are known; anything else is a :class:`UnitError`.
"""

from __future__ import annotations

import re
from decimal import Decimal

# dimension tags: L length, M mass, T time
LENGTH = "length"
VISCOSITY = "viscosity"
DENSITY = "density"
FORCE = "force"
VELOCITY = "velocity"

_LENGTH_UNITS = {
    "m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "μm": 1e-6,
    "micron": 1e-6, "nm": 1e-9, "pm": 1e-12, "A": 1e-10,
}
_TIME_UNITS = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "μs": 1e-6, "ns": 1e-9}

UNITS: dict[str, dict[str, float]] = {
    LENGTH: dict(_LENGTH_UNITS),
    FORCE: {"N": 1.0, "mN": 1e-3, "uN": 1e-6, "µN": 1e-6, "μN": 1e-6, "nN": 1e-9,
            "pN": 1e-12, "fN": 1e-15},
    VISCOSITY: {"Pa.s": 1.0, "Pa*s": 1.0, "Pa s": 1.0, "mPa.s": 1e-3, "mPa*s": 1e-3,
                "mPa s": 1e-3, "cP": 1e-3, "P": 0.1},
    DENSITY: {"kg/m^3": 1.0, "kg/m3": 1.0, "g/cm^3": 1e3, "g/cm3": 1e3, "gr/cm^3": 1e3,
              "gr/cm3": 1e3, "g/mL": 1e3},
    VELOCITY: {f"{lu}/{tu}": float(Decimal(repr(lf)) / Decimal(repr(tf)))
               for lu, lf in _LENGTH_UNITS.items()
               for tu, tf in _TIME_UNITS.items()},
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*?)\s*$")


class UnitError(ValueError):
    pass


def parse_quantity(value, dimension: str) -> float:
    """Return ``value`` in base SI units for ``dimension``.

    Bare numbers are taken to be SI already.
    """
    if isinstance(value, bool):
        raise UnitError(f"expected a {dimension}, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise UnitError(f"expected a {dimension} as number or string, got {value!r}")
    m = _QUANTITY.match(value)
    if not m:
        raise UnitError(f"cannot parse {value!r} as a {dimension}")
    number, unit = m.group(1), m.group(2)
    if not unit:
        return float(number)
    table = UNITS[dimension]
    if unit not in table:
        raise UnitError(f"unknown {dimension} unit {unit!r} in {value!r}")
    # decimal product, so "100 nm" is the float nearest 1e-7
    return float(Decimal(number) * Decimal(repr(table[unit])))
