"""Weight-stationary accelerator simulation with bit-traffic accounting.

Weights are loaded once; each input activation vector then streams through a
matrix-vector product with ReLU.  Four weight-handling designs are modelled:

  posit_all       weights move and sit in memory as full n-bit posits and the
                  datapath computes in posit arithmetic
  pofx_move       weights move compressed (n-1 bits), are converted once at
                  load time and stored as m-bit fixed point
  pofx_move_store weights move and stay compressed; every fetch runs the
                  converter again
  fxp_only        plain m-bit fixed-point weights end to end

Outputs are bit-identical between pofx_move and pofx_move_store (conversion
is deterministic) and both match fxp_only fed the converted weights.  The
ResourceAccount counts payload bits only; bus protocol and memory-block
granularity effects are left to external cost tables.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analysis import LayerTensor, ShapeMismatchError
from .dyadic import DyadicRational
from .fixedpoint import FxpConfig, FxpPattern, fxp_quantize_float
from .mac import (
    FXP_ONLY,
    POFX_PER_USE,
    POSIT_ONLY,
    ROUND_NEAREST,
    MacDesign,
    layer_forward,
)
from .normalized import quantize_normalized
from .posit import PositConfig

POSIT_ALL = "posit_all"
POFX_MOVE = "pofx_move"
POFX_MOVE_STORE = "pofx_move_store"
ACC_FXP_ONLY = "fxp_only"

_KINDS = (POSIT_ALL, POFX_MOVE, POFX_MOVE_STORE, ACC_FXP_ONLY)


@dataclass(frozen=True, slots=True)
class AcceleratorDesign:
    kind: str
    fxp: FxpConfig
    posit: PositConfig | None = None
    requant: str = ROUND_NEAREST

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown accelerator kind {self.kind!r}")
        if self.kind != ACC_FXP_ONLY and self.posit is None:
            raise ValueError(f"{self.kind} needs a posit config")

    def describe(self) -> str:
        # posit_all is labelled by the full width it stores; the converted
        # designs by the compressed width they move
        if self.kind == ACC_FXP_ONLY:
            return f"fxp:{self.fxp.m}"
        if self.kind == POSIT_ALL:
            return f"positall:{self.posit.n}:{self.posit.es}:{self.fxp.m}"
        name = "pofxmove" if self.kind == POFX_MOVE else "pofxmovestore"
        return f"{name}:{self.posit.n - 1}:{self.posit.es}:{self.fxp.m}"


@dataclass(frozen=True, slots=True)
class ResourceAccount:
    weight_bits_moved: int
    weight_bits_stored: int
    conversions_at_load: int
    conversions_per_inference: int
    activation_bits_moved: int

    def as_dict(self) -> dict:
        return {
            "weight_bits_moved": self.weight_bits_moved,
            "weight_bits_stored": self.weight_bits_stored,
            "conversions_at_load": self.conversions_at_load,
            "conversions_per_inference": self.conversions_per_inference,
            "activation_bits_moved": self.activation_bits_moved,
        }


def _mac_for(design: AcceleratorDesign) -> MacDesign:
    if design.kind == ACC_FXP_ONLY:
        return MacDesign(FXP_ONLY, design.fxp, requant=design.requant)
    if design.kind == POSIT_ALL:
        return MacDesign(POSIT_ONLY, design.fxp, design.posit, design.requant)
    return MacDesign(POFX_PER_USE, design.fxp, design.posit, design.requant)


def _account(design: AcceleratorDesign, count: int, batch: int, n_in: int, n_out: int) -> ResourceAccount:
    m = design.fxp.m
    act_bits = batch * (n_in + n_out) * m
    if design.kind == ACC_FXP_ONLY:
        return ResourceAccount(count * m, count * m, 0, 0, act_bits)
    n = design.posit.n
    if design.kind == POSIT_ALL:
        return ResourceAccount(count * n, count * n, 0, 0, act_bits)
    if design.kind == POFX_MOVE:
        return ResourceAccount(count * (n - 1), count * m, count, 0, act_bits)
    return ResourceAccount(count * (n - 1), count * (n - 1), 0, count, act_bits)


def simulate(
    design: AcceleratorDesign,
    weights: LayerTensor,
    batch: np.ndarray,
) -> tuple[list[list[FxpPattern]], ResourceAccount]:
    """Run a batch of activation vectors through the layer.

    ``weights`` has shape (n_in, n_out) as the layer stores it;  ``batch``
    has shape (batch_size, n_in).  Weight values are quantized into the
    design's storage format, activations into its fixed-point config, and
    the outputs come back as fixed-point patterns per batch item.
    """
    if weights.data.ndim != 2:
        raise ShapeMismatchError("weights must be a 2-D tensor")
    x = np.asarray(batch, dtype=np.float64)
    if x.ndim == 1:
        x = x[np.newaxis, :]
    n_in, n_out = weights.shape
    if x.shape[1] != n_in:
        raise ShapeMismatchError(
            f"activation vectors of length {x.shape[1]} against {n_in} inputs"
        )

    rows = weights.data.T  # (n_out, n_in): one weight vector per neuron
    if design.kind == ACC_FXP_ONLY:
        weight_rows = [
            [fxp_quantize_float(float(v), design.fxp) for v in row] for row in rows
        ]
    else:
        weight_rows = [
            [
                quantize_normalized(DyadicRational.from_float(float(v)), design.posit)
                for v in row
            ]
            for row in rows
        ]

    mac = _mac_for(design)
    outputs = []
    for vec in x:
        acts = [fxp_quantize_float(float(a), design.fxp) for a in vec]
        out, _ = layer_forward(mac, weight_rows, acts)
        outputs.append(out)
    account = _account(design, int(rows.size), x.shape[0], n_in, n_out)
    return outputs, account


def output_digest(outputs: Sequence[Sequence[FxpPattern]]) -> str:
    """Stable digest of a batch of fixed-point outputs."""
    text = ";".join(",".join(str(p.bits) for p in row) for row in outputs)
    return hashlib.sha256(text.encode()).hexdigest()


def compare_designs(
    designs: Sequence[AcceleratorDesign],
    weights: LayerTensor,
    batch: np.ndarray,
    baseline: int = 0,
) -> dict:
    """Per-design outputs, accounts and storage/traffic ratios vs a baseline."""
    if len(designs) < 2:
        raise ValueError("need at least two designs to compare")
    entries = []
    for design in designs:
        outputs, account = simulate(design, weights, batch)
        entries.append(
            {
                "design": design.describe(),
                "kind": design.kind,
                "output_digest": output_digest(outputs),
                "account": account.as_dict(),
            }
        )
    base = entries[baseline]["account"]
    for entry in entries:
        acc = entry["account"]
        entry["stored_ratio_vs_baseline"] = (
            acc["weight_bits_stored"] / base["weight_bits_stored"]
        )
        entry["moved_ratio_vs_baseline"] = (
            acc["weight_bits_moved"] / base["weight_bits_moved"]
        )
    return {"baseline": entries[baseline]["design"], "designs": entries}
