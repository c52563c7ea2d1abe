"""Rendering of rationals.  ``STRATAN_RATIONAL=decimal`` switches from the
default exact ``p/q`` form to decimals (six places, trailing zeros trimmed)."""

import os
from fractions import Fraction

ENV_VAR = "STRATAN_RATIONAL"


def print_mode() -> str:
    mode = os.environ.get(ENV_VAR, "fraction").strip().lower()
    return mode if mode in ("fraction", "decimal") else "fraction"


def fmt_rational(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    if print_mode() == "decimal":
        return f"{float(x):.6f}".rstrip("0").rstrip(".")
    return f"{x.numerator}/{x.denominator}"
