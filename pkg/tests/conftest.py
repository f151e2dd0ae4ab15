"""Shared test oracles, deliberately independent of the library internals.

The string decoder below re-derives posit values from first principles with
text manipulation only, so it shares no code with the packed bit arithmetic
it checks.
"""

from __future__ import annotations

from fractions import Fraction

import pytest


def string_decode(bits: str, es: int) -> Fraction | None:
    """Decode an n-bit pattern given as a 0/1 string; None means NaR."""
    n = len(bits)
    if bits == "0" * n:
        return Fraction(0)
    if bits == "1" + "0" * (n - 1):
        return None
    negative = bits[0] == "1"
    if negative:
        # two's complement of the whole word via int round-trip
        word = (1 << n) - int(bits, 2)
        bits = format(word, f"0{n}b")
    body = bits[1:]
    lead = body[0]
    run = len(body) - len(body.lstrip(lead))
    k = run - 1 if lead == "1" else -run
    rest = body[run + 1 :]  # skip the terminating bit (may be absent)
    exp_bits = rest[:es].ljust(es, "0")
    e = int(exp_bits, 2) if es else 0
    frac_bits = rest[es:]
    frac = Fraction(int(frac_bits, 2), 2 ** len(frac_bits)) if frac_bits else Fraction(0)
    value = Fraction(2) ** (2**es * k + e) * (1 + frac)
    return -value if negative else value


def as_fraction(v) -> Fraction:
    """Exact Fraction view of a DyadicRational."""
    return v.sign * Fraction(v.mantissa) * Fraction(2) ** v.exp2


@pytest.fixture
def rng():
    import random

    return random.Random(0xC0FFEE)
