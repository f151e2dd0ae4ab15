"""Bit-level posit to sign-magnitude fixed-point conversion pipeline.

The conversion runs in five feed-forward stages with no state between them:

  A  sign extraction, conditional two's complement of the low bits, and an
     inversion trick so a single leading-ones detector measures the regime
  B1 regime run length and regime value
  B2 exponent / fraction extraction through a one-hot boundary silhouette
  C  shift amount from the regime and exponent
  D  the shift itself, truncating bits that fall off the magnitude field
  E  optional sign-magnitude to two's complement (see fixedpoint module)

The ``general`` variant accepts any full-width pattern and shifts either
direction.  The ``normalized`` variant accepts the compressed (n-1)-bit form,
replicates the leading bit in stage A, stores the hidden bit one place below
the binary point and therefore only ever shifts right by

    (2**es) * regime_count - exponent - 1

realised in hardware by adding the one's complement of the exponent.  A shift
reaching the width of the magnitude field sets the overflow flag and forces
the magnitude to zero (the value is below fixed-point resolution).

Two inputs short-circuit the pipeline: exact zero (no hidden bit exists, so
the flagged all-shifted-out result is produced directly) and -1, which the
sign-magnitude output cannot hold when f = m - 1 and which saturates to
-(1 - 2**-f) with a dedicated trace flag.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fixedpoint import FxpConfig, SignMagPattern
from .posit import PositConfig, PositPattern
from .normalized import NormalizedPositPattern, expand

GENERAL = "general"
NORMALIZED = "normalized"


class NaRInputError(ValueError):
    """NaR has no fixed-point image."""


@dataclass(frozen=True, slots=True)
class ConverterSpec:
    posit: PositConfig
    fxp: FxpConfig
    variant: str = NORMALIZED

    def __post_init__(self) -> None:
        if self.variant not in (GENERAL, NORMALIZED):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant == NORMALIZED and self.fxp.f != self.fxp.m - 1:
            raise ValueError(
                "normalized conversion requires f = m - 1 "
                f"(got m={self.fxp.m}, f={self.fxp.f})"
            )

    @property
    def shift_register_width(self) -> int:
        return (self.fxp.m - 1).bit_length()


@dataclass(frozen=True, slots=True)
class StageTrace:
    """Intermediate values of one conversion, reproducible from the input."""

    sign: int
    post_a2: int
    lzd_input: int
    lzd_mask: int
    regime_count: int
    k: int
    e: int
    mag_before_shift: int
    shift: int
    mag_after_shift: int
    overflow: bool
    zero_input: bool = False
    neg_one_saturated: bool = False

    def dump(self) -> str:
        """Line-oriented text form, one stage per line, patterns in hex."""
        lines = [
            f"A sign={self.sign} post_a2={self.post_a2:#x} "
            f"lzd_in={self.lzd_input:#x}",
            f"B1 lzd={self.lzd_mask:#x} v={self.regime_count} k={self.k}",
            f"B2 e={self.e:#x}",
            f"C shift={self.shift}",
            f"D mag_before={self.mag_before_shift:#x} "
            f"mag_after={self.mag_after_shift:#x}",
            f"E overflow={int(self.overflow)} zero={int(self.zero_input)} "
            f"neg_one={int(self.neg_one_saturated)}",
        ]
        return "\n".join(lines)


def _mask(width: int) -> int:
    return (1 << width) - 1 if width > 0 else 0


def stage_a_prepare(p: PositPattern) -> tuple[int, int, int]:
    """Stages A1-A3: returns (sign, post-A2 bits, leading-ones detector input).

    The caller must have routed zero and NaR around the pipeline already.
    The detector input equals the post-A2 bits inverted when the regime
    starts with a zero, so a single contiguous-ones counter suffices.
    """
    n = p.config.n
    sign = (p.bits >> (n - 1)) & 1
    low = p.bits & _mask(n - 1)
    post_a2 = (-low) % (1 << (n - 1)) if sign else low
    if (post_a2 >> (n - 2)) & 1:
        return sign, post_a2, post_a2
    return sign, post_a2, post_a2 ^ _mask(n - 1)


def leading_ones(word: int, width: int) -> tuple[int, int]:
    """Contiguous leading-ones chain of a word: (mask, count)."""
    mask = 0
    count = 0
    for i in range(width - 1, -1, -1):
        if (word >> i) & 1:
            mask |= 1 << i
            count += 1
        else:
            break
    return mask, count


def regime_value(regime_count: int, leading_zero: bool) -> int:
    """Stage B1: run of m zeros gives -m, run of m ones gives m - 1."""
    return -regime_count if leading_zero else regime_count - 1


def silhouette_extract(
    post_a2: int, lzd_mask: int, n: int, es: int
) -> tuple[int, int, int]:
    """Stage B2: select exponent and fraction bits below the regime.

    Boundary marks EXT[i] = NOT(LZD[i+1] | LZD[i]) flag positions strictly
    below the regime terminator; their xor chain ST is one-hot at the top
    payload bit and steers each payload bit either into the exponent (the
    first es of them, most significant first, missing low bits reading 0)
    or into the fraction field.

    Returns (e, fraction_field, fraction_field_width) where the fraction
    field is aligned so its top bit sits just below the hidden bit.
    """
    if n < 4:
        return 0, 0, max(0, n - 3 - es)
    ext = {}
    for i in range(n - 3, -1, -1):
        hi = (lzd_mask >> (i + 1)) & 1
        lo = (lzd_mask >> i) & 1
        ext[i] = 1 - (hi | lo)
    st = {n - 4: ext[n - 4]}
    for i in range(n - 5, -1, -1):
        st[i] = ext[i + 1] ^ ext[i]
    switch = n - 4 - es
    frac_width = max(0, n - 3 - es)
    e = 0
    frac = 0
    for i in range(n - 3):
        bit = 0
        for j in range(i + 1):
            idx = n - 4 - i + j
            if 0 <= idx <= n - 4 and st.get(idx, 0) and (post_a2 >> j) & 1:
                bit = 1
        if i <= switch:
            frac |= bit << i
        else:
            e |= bit << (i - 1 - switch)
    return e, frac, frac_width


def shift_amount_general(k: int, e: int, es: int) -> int:
    """Stage C, general form: 2**es * k + e (negative means shift right)."""
    return (k << es) + e


def shift_amount_normalized(
    k_mag: int, e: int, es: int, mag_width: int
) -> tuple[int, bool]:
    """Stage C, right-shift-only form with the hidden bit below the point.

    The net right shift is 2**es * k_mag - e - 1 (one less than the general
    magnitude because the hidden bit starts half a position down), realised
    by adding the one's complement of e.  The overflow flag reports shifts
    that would push the hidden bit out of the magnitude field.
    """
    if k_mag < 0:
        raise ValueError("regime magnitude must be non-negative")
    shift = (k_mag << es) - e - 1
    return shift, shift >= mag_width


def _place_magnitude(hidden_pos: int, frac: int, frac_width: int) -> int:
    """Hidden bit at hidden_pos with the fraction field right below it;
    fraction bits that fall under bit 0 are truncated."""
    if frac_width <= hidden_pos:
        return (1 << hidden_pos) | (frac << (hidden_pos - frac_width))
    return (1 << hidden_pos) | (frac >> (frac_width - hidden_pos))


def convert(
    spec: ConverterSpec, pattern: PositPattern | NormalizedPositPattern
) -> tuple[SignMagPattern, StageTrace]:
    """Run the full pipeline; see the module docstring for the semantics."""
    if spec.variant == NORMALIZED:
        if not isinstance(pattern, NormalizedPositPattern):
            raise TypeError("normalized conversion takes the compressed form")
        full = expand(pattern)
    else:
        if not isinstance(pattern, PositPattern):
            raise TypeError("general conversion takes a full-width pattern")
        full = pattern
        if full.is_nar():
            raise NaRInputError("NaR cannot be converted to fixed point")
    if full.config != spec.posit:
        raise ValueError(f"pattern config {full.config} != spec {spec.posit}")

    n, es = spec.posit.n, spec.posit.es
    m, f = spec.fxp.m, spec.fxp.f
    mag_width = m - 1

    sign, post_a2, lzd_input = stage_a_prepare(full)
    leading_zero = not ((post_a2 >> (n - 2)) & 1)
    lzd_mask, count = leading_ones(lzd_input, n - 1)
    e, frac, frac_width = silhouette_extract(post_a2, lzd_mask, n, es)

    zero_input = full.bits == 0
    # -1 is the only unit-range pattern whose prepared magnitude still has
    # the top bit set; with f = m - 1 there is no integer bit to hold it
    neg_one = sign == 1 and post_a2 == 1 << (n - 2) and f == m - 1

    if spec.variant == NORMALIZED:
        k = count
        shift, overflow = shift_amount_normalized(count, e, es, mag_width)
        mag_before = _place_magnitude(f - 1, frac, frac_width)
        mag_after = 0 if overflow else mag_before >> shift
    else:
        k = regime_value(count, leading_zero)
        shift = shift_amount_general(k, e, es)
        mag_before = _place_magnitude(f, frac, frac_width)
        wide = mag_before << shift if shift >= 0 else mag_before >> -shift
        if wide >> mag_width:
            mag_after, overflow = _mask(mag_width), True
        else:
            mag_after, overflow = wide, wide == 0

    if zero_input:
        mag_after, overflow, neg_one = 0, True, False
    elif neg_one:
        mag_after, overflow = _mask(mag_width), False

    trace = StageTrace(
        sign=sign,
        post_a2=post_a2,
        lzd_input=lzd_input,
        lzd_mask=lzd_mask,
        regime_count=count,
        k=k,
        e=e,
        mag_before_shift=mag_before,
        shift=shift,
        mag_after_shift=mag_after,
        overflow=overflow,
        zero_input=zero_input,
        neg_one_saturated=neg_one,
    )
    return SignMagPattern(m, f, sign, mag_after, overflow), trace
