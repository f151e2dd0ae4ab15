"""Compressed (n-1)-bit storage form for posits in the unit range.

A pattern whose two leading bits agree decodes to a value in [-1, 1), so the
leading bit is redundant and can be dropped for storage or transfer.  Exactly
half of all patterns qualify; expansion replicates the stored leading bit.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dyadic import DyadicRational, dyadic
from .posit import PositConfig, PositPattern, decode_value, encode_round


class NormalizedRangeError(ValueError):
    """Pattern is outside the unit range and cannot be compressed."""


@dataclass(frozen=True, slots=True)
class NormalizedPositPattern:
    """(n-1)-bit compressed pattern; config records the original (n, es)."""

    config: PositConfig
    bits: int

    def __post_init__(self) -> None:
        if not 0 <= self.bits < (1 << (self.config.n - 1)):
            raise ValueError(
                f"bits 0x{self.bits:x} out of range for "
                f"{self.config.n - 1} stored bits"
            )

    @classmethod
    def from_string(cls, text: str, config: PositConfig) -> "NormalizedPositPattern":
        if len(text) != config.n - 1 or set(text) - {"0", "1"}:
            raise ValueError(
                f"expected {config.n - 1} binary digits, got {text!r}"
            )
        return cls(config, int(text, 2))

    def bitstring(self) -> str:
        return format(self.bits, f"0{self.config.n - 1}b")


def in_normalized_range(p: PositPattern) -> bool:
    """True iff the two leading bits agree, i.e. the value is in [-1, 1)."""
    n = p.config.n
    return (p.bits >> (n - 1)) & 1 == (p.bits >> (n - 2)) & 1


def compress(p: PositPattern) -> NormalizedPositPattern:
    """Drop the redundant leading bit of an in-range pattern."""
    if not in_normalized_range(p):
        raise NormalizedRangeError(
            f"pattern {p.bitstring()} is outside the unit range"
        )
    return NormalizedPositPattern(p.config, p.bits & ((1 << (p.config.n - 1)) - 1))


def expand(np_: NormalizedPositPattern) -> PositPattern:
    """Replicate the stored leading bit back to a full-width pattern."""
    n = np_.config.n
    lead = (np_.bits >> (n - 2)) & 1
    return PositPattern(np_.config, (lead << (n - 1)) | np_.bits)


def max_normalized_value(config: PositConfig) -> DyadicRational:
    """Largest representable in-range value, 1 - ulp."""
    v = decode_value(PositPattern(config, (1 << (config.n - 2)) - 1))
    assert isinstance(v, DyadicRational)
    return v


def quantize_normalized(
    v: DyadicRational, config: PositConfig, keep_neg_one: bool = True
) -> NormalizedPositPattern:
    """Round an arbitrary value into the compressed unit-range form.

    The value is clamped to [-1, 1 - ulp] first (or to [-(1 - ulp), 1 - ulp]
    when ``keep_neg_one`` is false), then rounded and compressed.
    """
    hi = max_normalized_value(config)
    lo = dyadic(-1) if keep_neg_one else -hi
    if v < lo:
        v = lo
    elif v > hi:
        v = hi
    return compress(encode_round(v, config))
