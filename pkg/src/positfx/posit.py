"""Posit(N, ES) bit patterns: exact decoding, rounding encoder and arithmetic.

A posit packs a sign bit, a run-length coded regime, up to ES exponent bits
and a fraction into N bits.  A non-special pattern decodes to

    (-1)^s * (2**(2**ES))**k * 2**e * (1 + f / 2**frac_len)

where a regime run of m zeros gives k = -m and a run of m ones gives
k = m - 1.  The all-zero pattern is exact zero and 1 followed by zeros is
NaR (not a real).  Negative patterns are decoded by two's-complementing the
word first, so the sign-magnitude field view below matches the bit-level
converter stage for stage.

Everything here is a pure function over immutable values and is safe to use
from any number of threads.
"""

from __future__ import annotations

import enum
from bisect import bisect_left
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .dyadic import DyadicRational, dyadic

_TABLE_MAX_N = 16  # configs up to this width get a cached value table


class Special(enum.Enum):
    """Distinguished decode results for the two reserved patterns."""

    ZERO = "zero"
    NAR = "nar"


class ConfigMismatchError(ValueError):
    """Operands of a binary posit operation carry different configs."""


@dataclass(frozen=True, slots=True)
class PositConfig:
    """Width and exponent-field size of a posit format.

    Any n >= 2 with es >= 0 is accepted; exponent bits that do not fit are
    simply truncated by the regime during decoding.
    """

    n: int
    es: int

    def __post_init__(self) -> None:
        if not 2 <= self.n <= 32:
            raise ValueError(f"posit width must be in [2, 32], got {self.n}")
        if not 0 <= self.es <= 5:
            raise ValueError(f"exponent size must be in [0, 5], got {self.es}")

    @property
    def useed_log2(self) -> int:
        return 1 << self.es

    @property
    def nar_bits(self) -> int:
        return 1 << (self.n - 1)

    def maxpos(self) -> DyadicRational:
        return dyadic(1, self.useed_log2 * (self.n - 2))

    def minpos(self) -> DyadicRational:
        return dyadic(1, -self.useed_log2 * (self.n - 2))


@dataclass(frozen=True, slots=True)
class PositPattern:
    """A raw n-bit pattern bound to its config; only the low n bits count."""

    config: PositConfig
    bits: int

    def __post_init__(self) -> None:
        if not 0 <= self.bits < (1 << self.config.n):
            raise ValueError(
                f"bits 0x{self.bits:x} out of range for {self.config.n}-bit posit"
            )

    @classmethod
    def from_string(cls, text: str, config: PositConfig) -> "PositPattern":
        if len(text) != config.n or set(text) - {"0", "1"}:
            raise ValueError(f"expected {config.n} binary digits, got {text!r}")
        return cls(config, int(text, 2))

    def bitstring(self) -> str:
        return format(self.bits, f"0{self.config.n}b")

    def is_zero(self) -> bool:
        return self.bits == 0

    def is_nar(self) -> bool:
        return self.bits == self.config.nar_bits


@dataclass(frozen=True, slots=True)
class PositFields:
    """Decoded field view: sign in {+1,-1}, regime value k, exponent e,
    fraction bits and their count."""

    sign: int
    k: int
    e: int
    frac_bits: int
    frac_len: int

    def fraction_value(self) -> DyadicRational:
        if self.frac_len == 0:
            return dyadic(0)
        return dyadic(self.frac_bits, -self.frac_len)


def zero_pattern(config: PositConfig) -> PositPattern:
    return PositPattern(config, 0)


def nar_pattern(config: PositConfig) -> PositPattern:
    return PositPattern(config, config.nar_bits)


def _split_magnitude(word: int, n: int, es: int) -> tuple[int, int, int, int]:
    """Split the low n-1 bits of a non-negative word into (k, e, frac, frac_len).

    The regime run is counted from bit n-2 downward; exponent bits fill from
    the most significant side and bits cut off by the regime read as zero.
    """
    width = n - 1
    lead = (word >> (width - 1)) & 1
    run = 0
    for i in range(width - 1, -1, -1):
        if (word >> i) & 1 == lead:
            run += 1
        else:
            break
    k = run - 1 if lead else -run
    rest = width - min(run + 1, width)  # bits after the regime terminator
    if rest >= es:
        frac_len = rest - es
        e = (word >> frac_len) & ((1 << es) - 1)
        frac = word & ((1 << frac_len) - 1) if frac_len else 0
        return k, e, frac, frac_len
    e = (word & ((1 << rest) - 1)) << (es - rest) if rest else 0
    return k, e, 0, 0


def raw_fields(p: PositPattern) -> PositFields:
    """Mechanical field split that treats the zero and NaR patterns like any
    other word (useful for table dumps and stage-level debugging)."""
    n = p.config.n
    sign_bit = p.bits >> (n - 1)
    word = p.bits if sign_bit == 0 else (-p.bits) % (1 << n)
    k, e, frac, frac_len = _split_magnitude(word, n, p.config.es)
    return PositFields(-1 if sign_bit else 1, k, e, frac, frac_len)


def decode_fields(p: PositPattern) -> PositFields | Special:
    """Field view of a pattern, or the ZERO / NAR marker."""
    if p.is_zero():
        return Special.ZERO
    if p.is_nar():
        return Special.NAR
    return raw_fields(p)


def _decode_word(word: int, config: PositConfig) -> DyadicRational:
    """Value of a non-negative (sign bit clear) pattern word."""
    if word == 0:
        return dyadic(0)
    k, e, frac, frac_len = _split_magnitude(word, config.n, config.es)
    scale = config.useed_log2 * k + e - frac_len
    return dyadic((1 << frac_len) + frac, scale)


def decode_value(p: PositPattern) -> DyadicRational | Special:
    """Exact decoded value; NaR yields the NAR marker, zero yields 0."""
    if p.is_nar():
        return Special.NAR
    n = p.config.n
    if p.bits >> (n - 1):
        return -_decode_word((-p.bits) % (1 << n), p.config)
    return _decode_word(p.bits, p.config)


@lru_cache(maxsize=64)
def _value_table(config: PositConfig) -> tuple[DyadicRational, ...]:
    """Values of the non-negative patterns 0 .. 2^(n-1)-1, which are already
    sorted ascending because pattern order equals value order."""
    return tuple(_decode_word(w, config) for w in range(1 << (config.n - 1)))


def _choose_nearest(
    below: int, above: int, v_below: DyadicRational, v_above: DyadicRational,
    magnitude: DyadicRational,
) -> int:
    """Pick the closer of two consecutive non-negative patterns; on an exact
    tie take the one whose last bit is 0."""
    d = (magnitude + magnitude)._cmp(v_below + v_above)
    if d < 0:
        return below
    if d > 0:
        return above
    return below if below % 2 == 0 else above


def _encode_magnitude(magnitude: DyadicRational, config: PositConfig) -> int:
    """Nearest non-negative pattern word for a positive magnitude."""
    if config.n <= _TABLE_MAX_N:
        values = _value_table(config)
        i = bisect_left(values, magnitude)
        if i == len(values):
            return len(values) - 1  # saturate at the largest posit
        if values[i]._cmp(magnitude) == 0:
            return i
        return _choose_nearest(i - 1, i, values[i - 1], values[i], magnitude)
    # wide configs: binary search the monotone pattern space instead
    top = (1 << (config.n - 1)) - 1
    if magnitude >= config.maxpos():
        return top
    lo, hi = 0, top
    while lo + 1 < hi:  # decode(lo) <= magnitude < decode(hi)
        mid = (lo + hi) // 2
        if _decode_word(mid, config) <= magnitude:
            lo = mid
        else:
            hi = mid
    v_lo = _decode_word(lo, config)
    if v_lo._cmp(magnitude) == 0:
        return lo
    return _choose_nearest(lo, hi, v_lo, _decode_word(hi, config), magnitude)


def encode_round(v: DyadicRational, config: PositConfig) -> PositPattern:
    """Round a finite value to the nearest pattern of the config.

    Ties go to the pattern with an even (zero) last bit and magnitudes at or
    beyond the largest posit saturate to it; the result is never NaR and
    exact zero maps to the zero pattern.
    """
    if v.sign == 0:
        return zero_pattern(config)
    word = _encode_magnitude(abs(v), config)
    bits = word if v.sign > 0 else (-word) % (1 << config.n)
    return PositPattern(config, bits)


def negate(p: PositPattern) -> PositPattern:
    """Two's complement of the full pattern; zero and NaR map to themselves."""
    return PositPattern(p.config, (-p.bits) % (1 << p.config.n))


# ---------------------------------------------------------------------------
# Reference arithmetic.  Operands are decoded exactly, combined in dyadic
# space, and re-encoded through a bit-construction packer that rounds by
# comparing the twoneighbouring patterns exactly.  The packer is deliberately
# a different code path from encode_round so the two can cross-check each
# other.
# ---------------------------------------------------------------------------


def _pack_magnitude(magnitude: DyadicRational, config: PositConfig) -> int:
    n, es = config.n, config.es
    top = (1 << (n - 1)) - 1
    if magnitude >= config.maxpos():
        return top
    minpos = config.minpos()
    if magnitude <= minpos:
        d = (magnitude + magnitude)._cmp(minpos)
        if d > 0:
            return 1
        return 0  # below the halfway point, or tied (pattern 0 ends in 0)
    # assemble sign=0 | regime | exponent | fraction at full precision
    t = magnitude.mantissa.bit_length() - 1 + magnitude.exp2
    k = t >> es
    e = t - (k << es)
    frac_len = magnitude.mantissa.bit_length() - 1
    frac = magnitude.mantissa - (1 << frac_len)
    if k >= 0:
        regime, regime_len = ((1 << (k + 1)) - 1) << 1, k + 2
    else:
        regime, regime_len = 1, -k + 1
    ext = ((regime << es) | e) << frac_len | frac
    ext_len = 1 + regime_len + es + frac_len
    if ext_len <= n:
        return ext << (n - ext_len)
    cut = ext_len - n
    word = ext >> cut
    if ext & ((1 << cut) - 1) == 0:
        return word
    return _choose_nearest(
        word, word + 1,
        _decode_word(word, config), _decode_word(word + 1, config),
        magnitude,
    )


def _pack_value(v: DyadicRational, config: PositConfig) -> PositPattern:
    if v.sign == 0:
        return zero_pattern(config)
    word = _pack_magnitude(abs(v), config)
    bits = word if v.sign > 0 else (-word) % (1 << config.n)
    return PositPattern(config, bits)


def _require_same_config(a: PositPattern, b: PositPattern) -> None:
    if a.config != b.config:
        raise ConfigMismatchError(f"config mismatch: {a.config} vs {b.config}")


def posit_add(a: PositPattern, b: PositPattern) -> PositPattern:
    """Correctly rounded sum; NaR absorbs."""
    _require_same_config(a, b)
    if a.is_nar() or b.is_nar():
        return nar_pattern(a.config)
    va, vb = decode_value(a), decode_value(b)
    assert isinstance(va, DyadicRational) and isinstance(vb, DyadicRational)
    return _pack_value(va + vb, a.config)


def posit_mul(a: PositPattern, b: PositPattern) -> PositPattern:
    """Correctly rounded product; NaR absorbs and zero annihilates."""
    _require_same_config(a, b)
    if a.is_nar() or b.is_nar():
        return nar_pattern(a.config)
    va, vb = decode_value(a), decode_value(b)
    assert isinstance(va, DyadicRational) and isinstance(vb, DyadicRational)
    return _pack_value(va * vb, a.config)


def posit_fma_accumulate(
    config: PositConfig,
    products: Iterable[tuple[PositPattern, PositPattern]],
) -> PositPattern:
    """Sum of exact products with a single terminal rounding.

    All factors must share ``config``; any NaR operand makes the result NaR
    and an empty sequence yields the zero pattern.
    """
    total = dyadic(0)
    for x, y in products:
        _require_same_config(x, y)
        if x.config != config:
            raise ConfigMismatchError(f"operand config {x.config} != {config}")
        if x.is_nar() or y.is_nar():
            return nar_pattern(config)
        vx, vy = decode_value(x), decode_value(y)
        assert isinstance(vx, DyadicRational) and isinstance(vy, DyadicRational)
        total = total + vx * vy
    return _pack_value(total, config)


def enumerate_all(
    config: PositConfig,
) -> list[tuple[PositPattern, DyadicRational | Special]]:
    """All 2^n patterns in ascending bit order with their decoded values.

    Refused for n > 16 to keep exhaustive sweeps bounded.
    """
    if config.n > _TABLE_MAX_N:
        raise ValueError(f"enumeration refused for n={config.n} (limit 16)")
    out = []
    for bits in range(1 << config.n):
        p = PositPattern(config, bits)
        out.append((p, decode_value(p)))
    return out
