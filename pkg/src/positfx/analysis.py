"""Quantization schemes, per-tensor error reports and design-space tools.

Four element-wise quantization paths are supported:

  fxp:M:F       round to the linear fixed-point grid
  posit:N:ES    round to the nearest posit and decode again
  pofx:K:ES:M   clamp into the unit range, round to a (K+1)-bit posit stored
                on K bits, run the bit-level converter to fixed point
  fpf:M:K:ES    fixed-point rounding first, then the pofx path at M bits

K counts the stored (compressed) posit bits throughout, so pofx:6:1:8 stores
6 bits per weight of a 7-bit posit.  Hardware cost numbers (pdp, luts, cpd,
power) are never computed here; they join from a user-supplied CSV keyed by
(kind, n, es, m).

Error statistics are reported in float64; quantized values themselves are
exact because every representable value of the supported formats fits a
double without rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .converter import NORMALIZED, ConverterSpec, convert
from .dyadic import DyadicRational
from .fixedpoint import FxpConfig, fxp_quantize_float
from .mac import MacDesign
from .normalized import quantize_normalized
from .posit import PositConfig, decode_value, encode_round

FXP = "fxp"
POSIT = "posit"
POFX = "pofx"
FPF = "fpf"

_KINDS = (FXP, POSIT, POFX, FPF)


class ShapeMismatchError(ValueError):
    pass


class SchemeSpecError(ValueError):
    """Unparseable scheme specification string."""


@dataclass(frozen=True, slots=True)
class QuantScheme:
    """One quantization path with its format parameters."""

    kind: str
    fxp: FxpConfig | None = None
    posit: PositConfig | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.kind in (FXP, POFX, FPF) and self.fxp is None:
            raise ValueError(f"{self.kind} scheme needs a fixed-point config")
        if self.kind in (POSIT, POFX, FPF) and self.posit is None:
            raise ValueError(f"{self.kind} scheme needs a posit config")

    @property
    def storage_bits(self) -> int:
        """Bits stored per weight under this scheme."""
        if self.kind == FXP:
            return self.fxp.m
        if self.kind == POSIT:
            return self.posit.n
        return self.posit.n - 1  # compressed storage

    def describe(self) -> str:
        if self.kind == FXP:
            return f"fxp:{self.fxp.m}:{self.fxp.f}"
        if self.kind == POSIT:
            return f"posit:{self.posit.n}:{self.posit.es}"
        if self.kind == POFX:
            return f"pofx:{self.posit.n - 1}:{self.posit.es}:{self.fxp.m}"
        return f"fpf:{self.fxp.m}:{self.posit.n - 1}:{self.posit.es}"

    @classmethod
    def parse(cls, text: str) -> "QuantScheme":
        parts = text.strip().split(":")
        try:
            kind, nums = parts[0], [int(x) for x in parts[1:]]
            if kind == FXP and len(nums) == 2:
                return cls(FXP, fxp=FxpConfig(nums[0], nums[1]))
            if kind == POSIT and len(nums) == 2:
                return cls(POSIT, posit=PositConfig(nums[0], nums[1]))
            if kind == POFX and len(nums) == 3:
                stored, es, m = nums
                return cls(
                    POFX,
                    fxp=FxpConfig(m, m - 1),
                    posit=PositConfig(stored + 1, es),
                )
            if kind == FPF and len(nums) == 3:
                m, stored, es = nums
                return cls(
                    FPF,
                    fxp=FxpConfig(m, m - 1),
                    posit=PositConfig(stored + 1, es),
                )
        except ValueError as exc:
            raise SchemeSpecError(f"bad scheme spec {text!r}: {exc}") from exc
        raise SchemeSpecError(f"bad scheme spec {text!r}")


@dataclass(frozen=True, eq=False)
class LayerTensor:
    """Named value tensor; data is float64 (lossless for 32-bit inputs)."""

    name: str
    shape: tuple[int, ...]
    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.data, dtype=np.float64).reshape(self.shape)
        if not np.all(np.isfinite(arr)):
            raise ValueError("tensor values must be finite")
        object.__setattr__(self, "data", arr)

    @property
    def count(self) -> int:
        return int(self.data.size)


@dataclass(frozen=True, slots=True)
class ErrorReport:
    avg_abs_error: float
    avg_abs_relative_error: float
    max_abs_error: float
    count_excluded_zeros: int

    def as_dict(self) -> dict:
        return {
            "avg_abs_error": self.avg_abs_error,
            "avg_abs_relative_error": self.avg_abs_relative_error,
            "max_abs_error": self.max_abs_error,
            "count_excluded_zeros": self.count_excluded_zeros,
        }


def _quantize_element(x: float, scheme: QuantScheme, cache: dict[int, float]) -> float:
    if scheme.kind == FXP:
        return fxp_quantize_float(x, scheme.fxp).to_float()
    if scheme.kind == POSIT:
        v = decode_value(encode_round(DyadicRational.from_float(x), scheme.posit))
        assert isinstance(v, DyadicRational)
        return v.to_float()
    if scheme.kind == FPF:
        x = fxp_quantize_float(x, scheme.fxp).to_float()
    pattern = quantize_normalized(DyadicRational.from_float(x), scheme.posit)
    if pattern.bits not in cache:
        spec = ConverterSpec(scheme.posit, scheme.fxp, NORMALIZED)
        sm, _ = convert(spec, pattern)
        cache[pattern.bits] = sm.to_float()
    return cache[pattern.bits]


def apply_scheme(scheme: QuantScheme, tensor: LayerTensor) -> LayerTensor:
    """Quantize every element; the result holds the representable values."""
    cache: dict[int, float] = {}
    flat = tensor.data.ravel()
    out = np.fromiter(
        (_quantize_element(float(x), scheme, cache) for x in flat),
        dtype=np.float64,
        count=flat.size,
    )
    return LayerTensor(tensor.name, tensor.shape, out.reshape(tensor.shape))


def weight_error_report(original: LayerTensor, quantized: LayerTensor) -> ErrorReport:
    if original.shape != quantized.shape:
        raise ShapeMismatchError(
            f"shape mismatch: {original.shape} vs {quantized.shape}"
        )
    return error_stats(original.data, quantized.data)


def error_stats(reference: np.ndarray, actual: np.ndarray) -> ErrorReport:
    """Absolute and relative error statistics; zero references are excluded
    from the relative average and counted instead."""
    ref = np.asarray(reference, dtype=np.float64).ravel()
    act = np.asarray(actual, dtype=np.float64).ravel()
    if ref.shape != act.shape:
        raise ShapeMismatchError(f"shape mismatch: {ref.shape} vs {act.shape}")
    if ref.size == 0:
        return ErrorReport(0.0, 0.0, 0.0, 0)
    diff = np.abs(act - ref)
    nonzero = ref != 0.0
    excluded = int(ref.size - np.count_nonzero(nonzero))
    if excluded == ref.size:
        rel = 0.0
    else:
        rel = float(np.mean(diff[nonzero] / np.abs(ref[nonzero])))
    return ErrorReport(float(np.mean(diff)), rel, float(np.max(diff)), excluded)


def activation_error_report(
    design: MacDesign,
    scheme: QuantScheme,
    weights: LayerTensor,
    inputs: np.ndarray,
    requantize_outputs: bool = True,
) -> ErrorReport:
    """Error induced in layer outputs by weight quantization alone.

    Weights (rows = output neurons) are quantized per the scheme while the
    input activations keep their full float precision, so both forward
    passes run the same exact float64 matrix product and differ only in the
    weights.  Outputs of the quantized pass are requantized with the same
    scheme before comparison unless disabled; the design records which MAC
    the scheme targets and is carried into reports by the callers.
    """
    if weights.data.ndim != 2:
        raise ShapeMismatchError("weights must be a 2-D tensor")
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim == 1:
        x = x[np.newaxis, :]
    if x.shape[1] != weights.shape[1]:
        raise ShapeMismatchError(
            f"inputs of length {x.shape[1]} against {weights.shape[1]} columns"
        )
    w = weights.data
    wq = apply_scheme(scheme, weights).data
    ref = np.maximum(x @ w.T, 0.0)
    out = np.maximum(x @ wq.T, 0.0)
    if requantize_outputs:
        out_tensor = LayerTensor("outputs", out.shape, out)
        out = apply_scheme(scheme, out_tensor).data
    return error_stats(ref, out)


def prune_configs(
    reports: Mapping[QuantScheme, ErrorReport] | Iterable[tuple[QuantScheme, ErrorReport]],
    max_avg_error: float,
    max_max_error: float,
) -> list[QuantScheme]:
    """Schemes meeting both error bounds, ordered by (avg error, bit width)."""
    if max_avg_error < 0 or max_max_error < 0:
        raise ValueError("error bounds must be non-negative")
    items = reports.items() if isinstance(reports, Mapping) else list(reports)
    kept = [
        (rep.avg_abs_error, scheme.storage_bits, scheme.describe(), scheme)
        for scheme, rep in items
        if rep.avg_abs_error <= max_avg_error and rep.max_abs_error <= max_max_error
    ]
    kept.sort(key=lambda t: t[:3])
    return [scheme for *_, scheme in kept]


# ---------------------------------------------------------------------------
# Multi-objective tooling: Pareto fronts and exact hypervolume.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParetoPoint:
    label: str
    objectives: dict[str, float]


def _vectors(points: Sequence[ParetoPoint]) -> tuple[list[str], list[tuple[float, ...]]]:
    if not points:
        return [], []
    keys = sorted(points[0].objectives)
    for p in points:
        if sorted(p.objectives) != keys:
            raise ValueError(f"inconsistent objectives on point {p.label!r}")
    return keys, [tuple(p.objectives[k] for k in keys) for p in points]


def _dominates(a: tuple[float, ...], b: tuple[float, ...]) -> bool:
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def pareto_front(points: Sequence[ParetoPoint]) -> list[ParetoPoint]:
    """Non-dominated subset (all objectives minimized), input order kept."""
    _, vecs = _vectors(points)
    keep = []
    for i, v in enumerate(vecs):
        if not any(_dominates(w, v) for j, w in enumerate(vecs) if j != i):
            keep.append(points[i])
    return keep


def reference_point(points: Sequence[ParetoPoint]) -> dict[str, float]:
    """Componentwise maximum over the set, padded out by one percent."""
    keys, vecs = _vectors(points)
    return {
        k: max(v[i] for v in vecs) * 1.01 for i, k in enumerate(keys)
    }


def hypervolume(
    points: Sequence[ParetoPoint], reference: Mapping[str, float]
) -> float:
    """Volume dominated by the point set up to the reference corner.

    Exact recursive slicing; every point must lie at or below the reference
    in all objectives.
    """
    keys, vecs = _vectors(points)
    if not vecs:
        return 0.0
    ref = tuple(float(reference[k]) for k in keys)
    for p, v in zip(points, vecs):
        if any(x > r for x, r in zip(v, ref)):
            raise ValueError(
                f"point {p.label!r} exceeds the reference in some objective"
            )
    return _hv(vecs, ref)


def _hv(vecs: list[tuple[float, ...]], ref: tuple[float, ...]) -> float:
    if not vecs:
        return 0.0
    if len(ref) == 1:
        return ref[0] - min(v[0] for v in vecs)
    order = sorted(vecs, key=lambda v: v[-1])
    total = 0.0
    for i, v in enumerate(order):
        z_lo = v[-1]
        z_hi = order[i + 1][-1] if i + 1 < len(order) else ref[-1]
        if z_hi > z_lo:
            slab = [w[:-1] for w in order[: i + 1]]
            total += (z_hi - z_lo) * _hv(slab, ref[:-1])
    return total
