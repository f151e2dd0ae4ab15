"""Bit-accurate multiply-accumulate models for the four weight-handling styles.

All designs consume fixed-point activations and produce a fixed-point result
requantized to the design's (m, f) config; ReLU is applied by layer_forward.

  fxp_only      weights arrive as FxpPattern; m x m multiplies feed an exact
                3m-bit accumulator
  pofx_per_use  weights arrive in the compressed posit form and pass through
                the bit-level converter before the identical datapath
  posit_only    weights stay posit; activations are rounded into the posit
                format and a chain of rounded multiply/add steps runs left to
                right (each step rounds)
  posit_fma     like posit_only but products are summed exactly with a single
                terminal rounding

Every function is pure; the returned MacTrace counts conversions, weight bits
fetched and accumulator saturations for resource accounting.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .converter import NORMALIZED, ConverterSpec, convert
from .dyadic import DyadicRational
from .fixedpoint import (
    FxpConfig,
    FxpPattern,
    accumulate_saturates,
    fxp_accumulate,
    fxp_multiply,
    relu,
    signmag_to_twos,
)
from .normalized import NormalizedPositPattern, expand
from .posit import (
    PositConfig,
    Special,
    decode_value,
    encode_round,
    posit_add,
    posit_fma_accumulate,
    posit_mul,
    zero_pattern,
)

FXP_ONLY = "fxp_only"
POFX_PER_USE = "pofx_per_use"
POSIT_ONLY = "posit_only"
POSIT_FMA = "posit_fma"

_KINDS = (FXP_ONLY, POFX_PER_USE, POSIT_ONLY, POSIT_FMA)

TRUNCATE = "truncate"
ROUND_NEAREST = "round_nearest"


@dataclass(frozen=True, slots=True)
class MacDesign:
    kind: str
    fxp: FxpConfig
    posit: PositConfig | None = None
    requant: str = ROUND_NEAREST

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown MAC kind {self.kind!r}")
        if self.requant not in (TRUNCATE, ROUND_NEAREST):
            raise ValueError(f"unknown requantization mode {self.requant!r}")
        if self.kind != FXP_ONLY:
            if self.posit is None:
                raise ValueError(f"{self.kind} needs a posit config")
            # converted weights carry m-1 fraction bits, so the shared
            # datapath config must too
            if self.fxp.f != self.fxp.m - 1:
                raise ValueError(f"{self.kind} requires f = m - 1")


@dataclass(slots=True)
class MacTrace:
    conversions: int = 0
    weight_bits_fetched: int = 0
    accumulator_saturations: int = 0


def _requantize_bits(bits: int, drop: int, mode: str) -> int:
    """Narrow an integer significand by ``drop`` fraction bits."""
    if drop <= 0:
        return bits << -drop
    if mode == TRUNCATE:
        return bits >> drop  # arithmetic shift, i.e. toward minus infinity
    q, r = divmod(bits, 1 << drop)
    half = 1 << (drop - 1)
    if r > half or (r == half and q & 1):
        q += 1
    return q


def _clamp(bits: int, config: FxpConfig) -> int:
    return min(max(bits, config.min_bits), config.max_bits)


def _requantize_value(v: DyadicRational, config: FxpConfig, mode: str) -> FxpPattern:
    scaled = v.sign * v.mantissa
    bits = _requantize_bits(scaled, -(v.exp2 + config.f), mode)
    return FxpPattern(config, _clamp(bits, config))


def _weight_to_fxp(
    w: NormalizedPositPattern, spec: ConverterSpec, trace: MacTrace
) -> FxpPattern:
    sm, _ = convert(spec, w)
    trace.conversions += 1
    if sm.overflow:
        # below fixed-point resolution: the datapath sees a zero weight
        return FxpPattern(FxpConfig(sm.m, sm.f), 0)
    return signmag_to_twos(sm)


def dot_product(
    design: MacDesign,
    weights: Sequence,
    activations: Sequence[FxpPattern],
) -> tuple[FxpPattern, MacTrace]:
    """One dot product through the chosen datapath.

    Weight encoding must match the design kind: FxpPattern for fxp_only,
    the compressed posit form for every other kind.  Activations always use
    the design's fxp config.
    """
    if len(weights) != len(activations):
        raise ValueError(
            f"length mismatch: {len(weights)} weights, {len(activations)} activations"
        )
    trace = MacTrace()
    cfg = design.fxp
    for a in activations:
        if a.config != cfg:
            raise ValueError(f"activation config {a.config} != design {cfg}")

    if design.kind in (FXP_ONLY, POFX_PER_USE):
        if design.kind == POFX_PER_USE:
            assert design.posit is not None
            spec = ConverterSpec(design.posit, cfg, NORMALIZED)
            stored_bits = design.posit.n - 1
            fxp_weights = [_weight_to_fxp(w, spec, trace) for w in weights]
        else:
            stored_bits = cfg.m
            fxp_weights = list(weights)
        trace.weight_bits_fetched = stored_bits * len(weights)
        acc = FxpPattern(FxpConfig(3 * cfg.m, 2 * cfg.f), 0)
        for w, a in zip(fxp_weights, activations):
            if w.config != cfg:
                raise ValueError(f"weight config {w.config} != design {cfg}")
            prod = fxp_multiply(w, a)
            if accumulate_saturates(acc, prod):
                trace.accumulator_saturations += 1
            acc = fxp_accumulate(acc, prod)
        result = _requantize_value(acc.value(), cfg, design.requant)
        return result, trace

    # posit datapaths: weights expand near the unit, activations are rounded in
    assert design.posit is not None
    pcfg = design.posit
    trace.weight_bits_fetched = (pcfg.n - 1) * len(weights)
    pos_weights = [expand(w) for w in weights]
    pos_acts = [encode_round(a.value(), pcfg) for a in activations]
    if design.kind == POSIT_FMA:
        total = posit_fma_accumulate(pcfg, list(zip(pos_weights, pos_acts)))
    else:
        total = zero_pattern(pcfg)
        for w, a in zip(pos_weights, pos_acts):
            total = posit_add(total, posit_mul(w, a))
    value = decode_value(total)
    if value is Special.NAR:
        raise ValueError("NaR reached the MAC result")
    assert isinstance(value, DyadicRational)
    return _requantize_value(value, cfg, design.requant), trace


def layer_forward(
    design: MacDesign,
    weight_rows: Sequence[Sequence],
    activations: Sequence[FxpPattern],
) -> tuple[list[FxpPattern], MacTrace]:
    """Row-wise dot products followed by ReLU; rows are output neurons."""
    outputs = []
    total = MacTrace()
    for row in weight_rows:
        out, trace = dot_product(design, row, activations)
        outputs.append(relu(out))
        total.conversions += trace.conversions
        total.weight_bits_fetched += trace.weight_bits_fetched
        total.accumulator_saturations += trace.accumulator_saturations
    return outputs, total


def fxp_weights_for(
    design: MacDesign, weights: Sequence[NormalizedPositPattern]
) -> list[FxpPattern]:
    """Converted fixed-point image of compressed posit weights (the exact
    values a pofx_per_use datapath multiplies with)."""
    assert design.posit is not None
    spec = ConverterSpec(design.posit, design.fxp, NORMALIZED)
    trace = MacTrace()
    return [_weight_to_fxp(w, spec, trace) for w in weights]
