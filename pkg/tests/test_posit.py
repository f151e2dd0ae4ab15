from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from positfx.dyadic import DyadicRational, dyadic
from positfx.posit import (
    ConfigMismatchError,
    PositConfig,
    PositPattern,
    Special,
    decode_fields,
    decode_value,
    encode_round,
    enumerate_all,
    negate,
    posit_add,
    posit_fma_accumulate,
    posit_mul,
    raw_fields,
)

from conftest import as_fraction, string_decode

P40 = PositConfig(4, 0)


def pat(text: str, config: PositConfig = P40) -> PositPattern:
    return PositPattern.from_string(text, config)


# Posit(4, 0) lookup: (bits, sign_bit, k, fraction, value or None for NaR)
LOOKUP_4_0 = [
    ("0000", 0, -3, Fraction(0), Fraction(0)),
    ("0001", 0, -2, Fraction(0), Fraction(1, 4)),
    ("0010", 0, -1, Fraction(0), Fraction(1, 2)),
    ("0011", 0, -1, Fraction(1, 2), Fraction(3, 4)),
    ("0100", 0, 0, Fraction(0), Fraction(1)),
    ("0101", 0, 0, Fraction(1, 2), Fraction(3, 2)),
    ("0110", 0, 1, Fraction(0), Fraction(2)),
    ("0111", 0, 2, Fraction(0), Fraction(4)),
    ("1000", 1, -3, Fraction(0), None),
    ("1001", 1, 2, Fraction(0), Fraction(-4)),
    ("1010", 1, 1, Fraction(0), Fraction(-2)),
    ("1011", 1, 0, Fraction(1, 2), Fraction(-3, 2)),
    ("1100", 1, 0, Fraction(0), Fraction(-1)),
    ("1101", 1, -1, Fraction(1, 2), Fraction(-3, 4)),
    ("1110", 1, -1, Fraction(0), Fraction(-1, 2)),
    ("1111", 1, -2, Fraction(0), Fraction(-1, 4)),
]


def test_lookup_table_4_0():
    for bits, sign_bit, k, frac, value in LOOKUP_4_0:
        p = pat(bits)
        fields = raw_fields(p)
        assert fields.sign == (-1 if sign_bit else 1), bits
        assert fields.k == k, bits
        assert as_fraction(fields.fraction_value()) == frac, bits
        decoded = decode_value(p)
        if value is None:
            assert decoded is Special.NAR
        else:
            assert as_fraction(decoded) == value, bits


def test_decode_fields_markers():
    assert decode_fields(pat("0000")) is Special.ZERO
    assert decode_fields(pat("1000")) is Special.NAR
    f = decode_fields(pat("0001"))
    assert (f.sign, f.k, f.e, f.frac_len) == (1, -2, 0, 0)


def test_decode_examples_5_1():
    c = PositConfig(5, 1)
    assert as_fraction(decode_value(pat("01011", c))) == 3
    assert as_fraction(decode_value(pat("01101", c))) == 8
    assert as_fraction(decode_value(pat("00110", c))) == Fraction(1, 2)


@pytest.mark.parametrize("n", range(2, 11))
@pytest.mark.parametrize("es", range(4))
def test_decode_matches_string_oracle(n, es):
    config = PositConfig(n, es)
    for bits in range(1 << n):
        p = PositPattern(config, bits)
        expected = string_decode(p.bitstring(), es)
        got = decode_value(p)
        if expected is None:
            assert got is Special.NAR
        else:
            assert as_fraction(got) == expected, p.bitstring()


def test_truncated_exponent_reads_high_bits_first():
    # one exponent bit left out of es=2: the present bit is the high one
    c = PositConfig(6, 2)
    p = pat("000011", c)  # regime 000, terminator 1, single exponent bit 1
    f = decode_fields(p)
    assert (f.k, f.e, f.frac_len) == (-3, 2, 0)


# ---------------------------------------------------------------------------
# encode_round
# ---------------------------------------------------------------------------


def test_encode_examples():
    assert encode_round(dyadic(3, -2), P40) == pat("0011")  # 0.75 exact
    assert encode_round(dyadic(0), P40) == pat("0000")
    # 0.3 sits between 0.25 and 0.5, closer to 0.25
    v = DyadicRational.from_float(0.3)
    assert encode_round(v, P40) == pat("0001")


def test_encode_saturates_no_nar():
    assert encode_round(dyadic(1, 20), P40) == pat("0111")
    assert encode_round(dyadic(-1, 20), P40) == pat("1001")
    assert encode_round(dyadic(1, 2), P40) == pat("0111")  # exactly maxpos


def test_encode_tiny_values_round_toward_zero_grid():
    # minpos/2 is an exact tie between 0 and minpos: even last bit wins
    assert encode_round(dyadic(1, -3), P40) == pat("0000")
    assert encode_round(dyadic(1, -10), P40) == pat("0000")
    # just above the tie goes to minpos
    assert encode_round(dyadic(3, -4), P40) == pat("0001")


def _linear_scan_nearest(v: Fraction, config: PositConfig) -> set[int]:
    """All patterns at minimum distance, by brute force over the table."""
    best = None
    winners: set[int] = set()
    maxpos = max(
        f for _, f in _oracle_values(config) if f is not None
    )
    if abs(v) >= maxpos:
        word = (1 << (config.n - 1)) - 1
        if v < 0:
            word = (1 << config.n) - word
        return {word}
    for bits, value in _oracle_values(config):
        if value is None:
            continue
        d = abs(value - v)
        if best is None or d < best:
            best, winners = d, {bits}
        elif d == best:
            winners.add(bits)
    return winners


def _oracle_values(config: PositConfig):
    for bits in range(1 << config.n):
        yield bits, string_decode(format(bits, f"0{config.n}b"), config.es)


@pytest.mark.parametrize("n,es", [(4, 0), (5, 1), (6, 2), (5, 0)])
def test_encode_is_nearest_with_even_ties(n, es, rng):
    config = PositConfig(n, es)
    values = [f for _, f in _oracle_values(config) if f is not None]
    values.sort()
    candidates = []
    # exact values, midpoints of neighbours, and dyadic points in between
    for lo, hi in zip(values, values[1:]):
        candidates.extend([lo, (lo + hi) / 2, lo + (hi - lo) * Fraction(3, 8)])
    for _ in range(50):
        candidates.append(Fraction(rng.randint(-300, 300), 64))
    for v in candidates:
        num, den = v.numerator, v.denominator
        assert den & (den - 1) == 0  # candidates must stay dyadic
        got = encode_round(dyadic(num, -(den.bit_length() - 1)), config)
        winners = _linear_scan_nearest(v, config)
        if len(winners) == 1:
            assert got.bits in winners, (v, got.bitstring())
        else:
            evens = {w for w in winners if w % 2 == 0}
            assert got.bits in evens, (v, got.bitstring())


@pytest.mark.parametrize("es", range(4))
@pytest.mark.parametrize("n", range(2, 13))
def test_round_trip_exhaustive(n, es):
    config = PositConfig(n, es)
    for bits in range(1 << n):
        p = PositPattern(config, bits)
        v = decode_value(p)
        if v is Special.NAR:
            continue
        assert encode_round(v, config) == p


@pytest.mark.parametrize("es", range(4))
@pytest.mark.parametrize("n", range(2, 11))
def test_monotonicity(n, es):
    config = PositConfig(n, es)
    decoded = {}
    for bits in range(1 << n):
        v = decode_value(PositPattern(config, bits))
        if v is not Special.NAR:
            decoded[bits] = as_fraction(v)
    # non-negative patterns ascend with the bit value
    non_neg = [decoded[b] for b in sorted(b for b in decoded if b < (1 << (n - 1)))]
    assert non_neg == sorted(non_neg)
    assert len(set(non_neg)) == len(non_neg)
    # signed two's-complement order equals numeric order over all patterns
    def signed(b):
        return b - (1 << n) if b >> (n - 1) else b

    ordered = [decoded[b] for b in sorted(decoded, key=signed)]
    assert ordered == sorted(ordered)


@pytest.mark.parametrize("es", range(4))
@pytest.mark.parametrize("n", range(2, 11))
def test_negation_symmetry_exhaustive(n, es):
    config = PositConfig(n, es)
    for bits in range(1 << n):
        p = PositPattern(config, bits)
        v = decode_value(p)
        nv = decode_value(negate(p))
        if v is Special.NAR:
            assert nv is Special.NAR
        else:
            assert as_fraction(nv) == -as_fraction(v)


def test_negate_examples():
    assert negate(pat("0011")) == pat("1101")
    assert negate(pat("0000")) == pat("0000")
    assert negate(pat("0110")) == pat("1010")
    assert negate(pat("1000")) == pat("1000")


# ---------------------------------------------------------------------------
# arithmetic
# ---------------------------------------------------------------------------


def test_add_examples():
    assert posit_add(pat("0001"), pat("0001")) == pat("0010")
    assert posit_add(pat("0101"), pat("0000")) == pat("0101")
    assert posit_add(pat("0111"), pat("0111")) == pat("0111")  # saturates at 4


def test_mul_examples():
    assert posit_mul(pat("0010"), pat("0010")) == pat("0001")
    assert posit_mul(pat("0101"), pat("0000")) == pat("0000")
    assert posit_mul(pat("0110"), pat("0110")) == pat("0111")  # 2*2 = 4


def test_nar_absorbs():
    nar = pat("1000")
    assert posit_add(nar, pat("0010")).is_nar()
    assert posit_mul(pat("0000"), nar).is_nar()


def test_config_mismatch_rejected():
    with pytest.raises(ConfigMismatchError):
        posit_add(pat("0001"), PositPattern(PositConfig(5, 0), 1))


@pytest.mark.parametrize("es", range(3))
@pytest.mark.parametrize("n", range(2, 8))
def test_arithmetic_matches_exact_then_round(n, es):
    """Sequentially rounded ops agree with exact dyadic op + encode_round."""
    config = PositConfig(n, es)
    patterns = [PositPattern(config, b) for b in range(1 << n)]
    values = [decode_value(p) for p in patterns]
    for pa, va in zip(patterns, values):
        for pb, vb in zip(patterns, values):
            if va is Special.NAR or vb is Special.NAR:
                assert posit_add(pa, pb).is_nar()
                assert posit_mul(pa, pb).is_nar()
                continue
            assert posit_add(pa, pb) == encode_round(va + vb, config)
            assert posit_mul(pa, pb) == encode_round(va * vb, config)


def test_fma_examples():
    # 0.25 * 0.5 = 0.125, an exact tie between 0 and minpos: even pattern wins
    assert posit_fma_accumulate(P40, [(pat("0001"), pat("0010"))]) == pat("0000")
    assert posit_fma_accumulate(P40, []) == pat("0000")
    assert posit_fma_accumulate(
        P40, [(pat("0010"), pat("0010")), (pat("0010"), pat("0010"))]
    ) == pat("0010")


def test_fma_single_rounding_beats_sequential():
    # 2 + 0.75 + 0.75 : sequential rounding loses the halves, the fused
    # accumulation keeps the exact 3.5 until the end
    c = PositConfig(4, 0)
    seq = posit_add(posit_add(pat("0110"), pat("0011")), pat("0011"))
    one = pat("0100")
    fused = posit_fma_accumulate(
        c, [(pat("0110"), one), (pat("0011"), one), (pat("0011"), one)]
    )
    assert as_fraction(decode_value(fused)) == 4  # 3.5 rounds to 4
    assert as_fraction(decode_value(seq)) == 2  # 2 absorbed both 0.75s


def test_fma_nar():
    assert posit_fma_accumulate(P40, [(pat("1000"), pat("0000"))]).is_nar()


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def test_enumerate_2_0():
    table = enumerate_all(PositConfig(2, 0))
    got = {p.bitstring(): v for p, v in table}
    assert as_fraction(got["00"]) == 0
    assert as_fraction(got["01"]) == 1
    assert got["10"] is Special.NAR
    assert as_fraction(got["11"]) == -1


@pytest.mark.parametrize("n,es", [(4, 0), (7, 2), (10, 3)])
def test_enumerate_cardinality(n, es):
    assert len(enumerate_all(PositConfig(n, es))) == 1 << n


def test_enumerate_guard():
    with pytest.raises(ValueError):
        enumerate_all(PositConfig(17, 0))


@settings(max_examples=200)
@given(
    st.integers(min_value=2, max_value=12),
    st.integers(min_value=0, max_value=3),
    st.data(),
)
def test_round_trip_property(n, es, data):
    config = PositConfig(n, es)
    bits = data.draw(st.integers(min_value=0, max_value=(1 << n) - 1))
    p = PositPattern(config, bits)
    v = decode_value(p)
    if v is not Special.NAR:
        assert encode_round(v, config) == p


@pytest.mark.parametrize("n,es", [(18, 0), (20, 4), (32, 5)])
def test_wide_configs_round_trip_and_match_oracle(n, es, rng):
    """Widths beyond the cached-table limit use the search-based encoder."""
    config = PositConfig(n, es)
    for _ in range(300):
        p = PositPattern(config, rng.randrange(1 << n))
        v = decode_value(p)
        if v is Special.NAR:
            continue
        assert encode_round(v, config) == p
    for _ in range(100):
        a = PositPattern(config, rng.randrange(1 << n))
        b = PositPattern(config, rng.randrange(1 << n))
        va, vb = decode_value(a), decode_value(b)
        if va is Special.NAR or vb is Special.NAR:
            continue
        assert posit_add(a, b) == encode_round(va + vb, config)
        assert posit_mul(a, b) == encode_round(va * vb, config)
