"""Two's-complement and sign-magnitude fixed point, plus MAC-width arithmetic.

FxP(M, F) stores a value as an M-bit two's-complement integer with F
fraction bits, covering [-2^(M-1-F), (2^(M-1)-1)/2^F] in steps of 2^-F.
The multiply/accumulate helpers model the widths used inside a MAC datapath:
an exact M x M -> 2M multiplier feeding a saturating 3M-bit accumulator.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dyadic import DyadicRational, dyadic


class SignMagOverflowError(ValueError):
    """Sign-magnitude input carries the overflow flag and cannot convert."""


@dataclass(frozen=True, slots=True)
class FxpConfig:
    m: int
    f: int

    def __post_init__(self) -> None:
        # 96 bits leaves room for the 3M accumulator of a 32-bit datapath
        if not 2 <= self.m <= 96:
            raise ValueError(f"fxp width must be in [2, 96], got {self.m}")
        if not 0 <= self.f <= self.m - 1:
            raise ValueError(f"fraction length {self.f} not in [0, {self.m - 1}]")

    @property
    def min_bits(self) -> int:
        return -(1 << (self.m - 1))

    @property
    def max_bits(self) -> int:
        return (1 << (self.m - 1)) - 1


@dataclass(frozen=True, slots=True)
class FxpPattern:
    """Two's-complement fixed-point value; ``bits`` is the signed integer."""

    config: FxpConfig
    bits: int

    def __post_init__(self) -> None:
        if not self.config.min_bits <= self.bits <= self.config.max_bits:
            raise ValueError(
                f"bits {self.bits} out of range for {self.config.m}-bit pattern"
            )

    def value(self) -> DyadicRational:
        return dyadic(self.bits, -self.config.f)

    def to_float(self) -> float:
        return self.bits / (1 << self.config.f)

    def bitstring(self) -> str:
        return format(self.bits % (1 << self.config.m), f"0{self.config.m}b")


@dataclass(frozen=True, slots=True)
class SignMagPattern:
    """Sign-magnitude fixed point with an explicit unrepresentable flag."""

    m: int
    f: int
    sign: int
    magnitude: int
    overflow: bool = False

    def __post_init__(self) -> None:
        if self.sign not in (0, 1):
            raise ValueError(f"sign bit must be 0 or 1, got {self.sign}")
        if not 0 <= self.magnitude < (1 << (self.m - 1)):
            raise ValueError(
                f"magnitude {self.magnitude} needs more than {self.m - 1} bits"
            )

    def value(self) -> DyadicRational:
        v = dyadic(self.magnitude, -self.f)
        return -v if self.sign else v

    def to_float(self) -> float:
        mag = self.magnitude / (1 << self.f)
        return -mag if self.sign else mag

    def magnitude_string(self) -> str:
        return format(self.magnitude, f"0{self.m - 1}b")


def _round_half_even(num: int, shift: int) -> int:
    """Round num / 2**shift to the nearest integer, ties to even."""
    if shift <= 0:
        return num << -shift
    q, r = divmod(abs(num), 1 << shift)
    half = 1 << (shift - 1)
    if r > half or (r == half and q & 1):
        q += 1
    return q if num >= 0 else -q


def fxp_quantize(v: DyadicRational, config: FxpConfig) -> FxpPattern:
    """Nearest representable value, ties to even integer bits, saturating."""
    scaled = v.sign * v.mantissa  # value * 2**f == scaled * 2**(exp2 + f)
    bits = _round_half_even(scaled, -(v.exp2 + config.f))
    bits = min(max(bits, config.min_bits), config.max_bits)
    return FxpPattern(config, bits)


def fxp_quantize_float(x: float, config: FxpConfig) -> FxpPattern:
    return fxp_quantize(DyadicRational.from_float(x), config)


def fxp_multiply(a: FxpPattern, b: FxpPattern) -> FxpPattern:
    """Exact product at doubled width (2M bits, 2F fraction bits)."""
    if a.config != b.config:
        raise ValueError(f"config mismatch: {a.config} vs {b.config}")
    wide = FxpConfig(2 * a.config.m, 2 * a.config.f)
    return FxpPattern(wide, a.bits * b.bits)


def _check_accumulator(acc: FxpPattern, addend: FxpPattern) -> None:
    # accumulator is 3M bits, addend 2M bits, sharing the 2F fraction length
    if acc.config.f != addend.config.f or 2 * acc.config.m != 3 * addend.config.m:
        raise ValueError(
            f"accumulator {acc.config} does not match addend {addend.config}"
        )


def accumulate_saturates(acc: FxpPattern, addend: FxpPattern) -> bool:
    """True when the exact sum does not fit the accumulator width."""
    _check_accumulator(acc, addend)
    total = acc.bits + addend.bits
    return not acc.config.min_bits <= total <= acc.config.max_bits


def fxp_accumulate(acc: FxpPattern, addend: FxpPattern) -> FxpPattern:
    """Exact sum into the wide accumulator, clamping at its range ends."""
    _check_accumulator(acc, addend)
    total = acc.bits + addend.bits
    total = min(max(total, acc.config.min_bits), acc.config.max_bits)
    return FxpPattern(acc.config, total)


def relu(p: FxpPattern) -> FxpPattern:
    return p if p.bits >= 0 else FxpPattern(p.config, 0)


def signmag_to_twos(s: SignMagPattern) -> FxpPattern:
    """Value-preserving conversion; negative zero collapses to +0."""
    if s.overflow:
        raise SignMagOverflowError(
            "overflow-flagged sign-magnitude value cannot be converted"
        )
    bits = -s.magnitude if s.sign else s.magnitude
    return FxpPattern(FxpConfig(s.m, s.f), bits)
