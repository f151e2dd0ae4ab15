"""Exact arithmetic on dyadic rationals (sign * mantissa * 2**exp2).

Every posit and every fixed-point number is a dyadic rational, so this type
serves as the lossless value domain shared by all encoders, converters and
error analyses in the package.  Addition, multiplication and comparison are
exact; only ``to_float`` can round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class DyadicRational:
    """Value ``sign * mantissa * 2**exp2`` in canonical form.

    Canonical means the mantissa is odd (or zero, in which case sign and
    exp2 are zero too), so equal values always compare and hash equal.
    Use :func:`dyadic` or the ``from_*`` constructors instead of calling
    the dataclass directly.
    """

    sign: int
    mantissa: int
    exp2: int

    def __post_init__(self) -> None:
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign}")
        if self.mantissa < 0:
            raise ValueError("mantissa must be non-negative")
        if self.sign == 0:
            if self.mantissa != 0 or self.exp2 != 0:
                raise ValueError("zero must be (0, 0, 0)")
        else:
            if self.mantissa == 0:
                raise ValueError("nonzero sign with zero mantissa")
            if self.mantissa % 2 == 0:
                raise ValueError("mantissa must be odd (canonical form)")

    # ---- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "DyadicRational":
        return _ZERO

    @classmethod
    def from_int(cls, value: int) -> "DyadicRational":
        return dyadic(value)

    @classmethod
    def from_float(cls, value: float) -> "DyadicRational":
        """Lossless import of a finite binary float (32- or 64-bit)."""
        if not math.isfinite(value):
            raise ValueError(f"cannot represent non-finite value {value!r}")
        num, den = float(value).as_integer_ratio()
        return dyadic(num, -(den.bit_length() - 1))

    # ---- predicates / accessors ---------------------------------------

    def is_zero(self) -> bool:
        return self.sign == 0

    def to_float(self) -> float:
        """Nearest binary64 value (exact whenever it fits in a double)."""
        if self.sign == 0:
            return 0.0
        return self.sign * math.ldexp(self.mantissa, self.exp2)

    def __float__(self) -> float:
        return self.to_float()

    # ---- arithmetic ----------------------------------------------------

    def __neg__(self) -> "DyadicRational":
        if self.sign == 0:
            return self
        return DyadicRational(-self.sign, self.mantissa, self.exp2)

    def __abs__(self) -> "DyadicRational":
        if self.sign < 0:
            return -self
        return self

    def __add__(self, other: "DyadicRational") -> "DyadicRational":
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        e = min(self.exp2, other.exp2)
        num = self.sign * (self.mantissa << (self.exp2 - e)) + other.sign * (
            other.mantissa << (other.exp2 - e)
        )
        return dyadic(num, e)

    def __sub__(self, other: "DyadicRational") -> "DyadicRational":
        return self + (-other)

    def __mul__(self, other: "DyadicRational") -> "DyadicRational":
        if self.sign == 0 or other.sign == 0:
            return _ZERO
        # odd * odd stays odd, so the product is already canonical
        return DyadicRational(
            self.sign * other.sign,
            self.mantissa * other.mantissa,
            self.exp2 + other.exp2,
        )

    # ---- ordering -------------------------------------------------------

    def _cmp(self, other: "DyadicRational") -> int:
        if self.sign != other.sign:
            return -1 if self.sign < other.sign else 1
        if self.sign == 0:
            return 0
        # same nonzero sign: compare magnitudes, sign flips the direction
        a_top = self.mantissa.bit_length() + self.exp2
        b_top = other.mantissa.bit_length() + other.exp2
        if a_top != b_top:
            mag = -1 if a_top < b_top else 1
        else:
            e = min(self.exp2, other.exp2)
            a = self.mantissa << (self.exp2 - e)
            b = other.mantissa << (other.exp2 - e)
            mag = (a > b) - (a < b)
        return mag * self.sign

    def __lt__(self, other: "DyadicRational") -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: "DyadicRational") -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other: "DyadicRational") -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other: "DyadicRational") -> bool:
        return self._cmp(other) >= 0

    def __repr__(self) -> str:
        return f"DyadicRational({decimal_string(self)})"


_ZERO = DyadicRational(0, 0, 0)


def dyadic(num: int, exp2: int = 0) -> DyadicRational:
    """Build the canonical dyadic rational ``num * 2**exp2``."""
    if num == 0:
        return _ZERO
    sign = 1 if num > 0 else -1
    mag = abs(num)
    shift = (mag & -mag).bit_length() - 1
    return DyadicRational(sign, mag >> shift, exp2 + shift)


def decimal_string(v: DyadicRational) -> str:
    """Exact decimal rendering, e.g. 3*2**-2 -> '0.75', 2**2 -> '4'."""
    if v.sign == 0:
        return "0"
    prefix = "-" if v.sign < 0 else ""
    if v.exp2 >= 0:
        return prefix + str(v.mantissa << v.exp2)
    frac_digits = -v.exp2
    scaled = v.mantissa * 5**frac_digits  # m / 2**d == m * 5**d / 10**d
    text = str(scaled).rjust(frac_digits + 1, "0")
    whole, frac = text[:-frac_digits], text[-frac_digits:]
    frac = frac.rstrip("0")
    return prefix + (f"{whole}.{frac}" if frac else whole)
