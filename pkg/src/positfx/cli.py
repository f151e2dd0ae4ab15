"""Command-line frontend.

Subcommands:

  table     dump every pattern of a posit config with fields, value and the
            compressed unit-range form
  convert   run one value or pattern through the bit-level converter
  analyze   per-scheme weight quantization error reports for a tensor file
  pareto    join error reports with a hardware cost table, report the Pareto
            front and hypervolume
  simulate  weight-stationary accelerator comparison on a layer

Exit codes: 0 success, 2 usage error, 3 domain error (NaR, overflow,
unsatisfiable request), 4 I/O or data-format error.  The EXPAND_COSTS
environment variable supplies a default cost-table path for ``pareto``.
All output files are byte-deterministic for identical inputs.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .accelerator import (
    ACC_FXP_ONLY,
    POFX_MOVE,
    POFX_MOVE_STORE,
    POSIT_ALL,
    AcceleratorDesign,
    compare_designs,
)
from .analysis import (
    FPF,
    POFX,
    ErrorReport,
    ParetoPoint,
    QuantScheme,
    SchemeSpecError,
    ShapeMismatchError,
    apply_scheme,
    hypervolume,
    pareto_front,
    reference_point,
    weight_error_report,
)
from .converter import GENERAL, NORMALIZED, ConverterSpec, NaRInputError, convert
from .dyadic import DyadicRational, decimal_string
from .fixedpoint import FxpConfig, SignMagOverflowError, signmag_to_twos
from .normalized import (
    NormalizedPositPattern,
    NormalizedRangeError,
    compress,
    in_normalized_range,
    quantize_normalized,
)
from .posit import (
    PositConfig,
    PositPattern,
    Special,
    decode_value,
    encode_round,
    raw_fields,
)
from .reports import MissingCostRowError, dump_report, load_cost_table, load_report
from .tensorio import TensorFormatError, load_tensor

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_IO = 4

_DOMAIN_ERRORS = (
    NaRInputError,
    NormalizedRangeError,
    SignMagOverflowError,
    ShapeMismatchError,
    MissingCostRowError,
)


class UsageError(ValueError):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="positfx", description="posit / fixed-point conversion toolkit"
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", help="dump all patterns of a posit config")
    p.add_argument("--n", type=int, required=True, help="posit width (<= 16)")
    p.add_argument("--es", type=int, required=True, help="exponent field size")

    p = sub.add_parser("convert", help="convert one value or pattern to fixed point")
    p.add_argument("--value", type=float, help="decimal value to quantize first")
    p.add_argument("--posit-bits", help="binary pattern (n bits, or n-1 normalized)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--es", type=int, required=True)
    p.add_argument("--m", type=int, default=8, help="fixed-point output width")
    p.add_argument("--f", type=int, default=None,
                   help="fraction bits (default m-1 normalized, m-2 general)")
    p.add_argument("--variant", choices=(GENERAL, NORMALIZED), default=NORMALIZED)
    p.add_argument("--trace", action="store_true", help="dump the stage trace")

    p = sub.add_parser("analyze", help="weight quantization error per scheme")
    p.add_argument("--weights", required=True, help="tensor file (.json or .csv)")
    p.add_argument("--schemes", nargs="+", required=True,
                   help="scheme specs: fxp:M:F posit:N:ES pofx:K:ES:M fpf:M:K:ES")
    p.add_argument("--out", required=True, help="report file to write")

    p = sub.add_parser("pareto", help="Pareto front over reports and cost table")
    p.add_argument("--reports", required=True, help="directory of analyze reports")
    p.add_argument("--costs", default=None,
                   help="cost table CSV (default: EXPAND_COSTS env var)")
    p.add_argument("--objectives", required=True,
                   help="comma-separated objective names, all minimized")
    p.add_argument("--out", required=True)

    p = sub.add_parser("simulate", help="compare accelerator weight designs")
    p.add_argument("--weights", required=True, help="layer tensor (n_in x n_out)")
    p.add_argument("--activations", required=True,
                   help="activation tensor (batch x n_in)")
    p.add_argument("--designs", nargs="+", required=True,
                   help="design specs: fxp:M positall:N:ES:M "
                        "pofxmove:K:ES:M pofxmovestore:K:ES:M")
    p.add_argument("--requant", choices=("round_nearest", "truncate"),
                   default="round_nearest")
    p.add_argument("--out", required=True)
    return parser


# ---------------------------------------------------------------------------
# table
# ---------------------------------------------------------------------------


def _cmd_table(args) -> int:
    if args.n > 16:
        raise UsageError(f"table dump limited to n <= 16, got {args.n}")
    config = PositConfig(args.n, args.es)
    header = ("bits", "s", "k", "e", "f", "value", "norm", "compressed")
    rows = [header]
    for bits in range(1 << config.n):
        p = PositPattern(config, bits)
        fields = raw_fields(p)
        value = decode_value(p)
        value_str = "NaR" if value is Special.NAR else decimal_string(value)
        normal = in_normalized_range(p)
        compressed = compress(p).bitstring() if normal else "-"
        rows.append(
            (
                p.bitstring(),
                "0" if fields.sign > 0 else "1",
                str(fields.k),
                str(fields.e),
                decimal_string(fields.fraction_value()),
                value_str,
                "yes" if normal else "no",
                compressed,
            )
        )
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    for row in rows:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return EXIT_OK


# ---------------------------------------------------------------------------
# convert
# ---------------------------------------------------------------------------


def _cmd_convert(args) -> int:
    if (args.value is None) == (args.posit_bits is None):
        raise UsageError("give exactly one of --value or --posit-bits")
    config = PositConfig(args.n, args.es)
    f = args.f
    if f is None:
        f = args.m - 1 if args.variant == NORMALIZED else args.m - 2
    spec = ConverterSpec(config, FxpConfig(args.m, f), args.variant)

    if args.posit_bits is not None:
        if args.variant == NORMALIZED:
            pattern = NormalizedPositPattern.from_string(args.posit_bits, config)
        else:
            pattern = PositPattern.from_string(args.posit_bits, config)
    else:
        value = DyadicRational.from_float(args.value)
        if args.variant == NORMALIZED:
            pattern = quantize_normalized(value, config)
        else:
            pattern = encode_round(value, config)

    sign_mag, trace = convert(spec, pattern)
    decoded = sign_mag.value()
    print(f"input: {pattern.bitstring()} "
          f"(posit n={config.n} es={config.es}, {args.variant})")
    print(f"sign_magnitude: sign={sign_mag.sign} "
          f"magnitude={sign_mag.magnitude_string()} "
          f"overflow={int(sign_mag.overflow)}")
    if sign_mag.overflow:
        # below fixed-point resolution: the datapath substitutes a zero word
        print(f"fxp_twos_complement: {'0' * args.m} (overflow)")
    else:
        print(f"fxp_twos_complement: {signmag_to_twos(sign_mag).bitstring()}")
    print(f"fxp_value: {decimal_string(decoded)}")
    if args.trace:
        print(trace.dump())
    return EXIT_OK


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def _parse_schemes(specs: list[str]) -> list[QuantScheme]:
    try:
        return [QuantScheme.parse(s) for s in specs]
    except SchemeSpecError as exc:
        raise UsageError(str(exc)) from exc


def _scheme_entry(scheme: QuantScheme, report: ErrorReport) -> dict:
    return {
        "scheme": scheme.describe(),
        "kind": scheme.kind,
        "storage_bits": scheme.storage_bits,
        "error": report.as_dict(),
    }


def _cmd_analyze(args) -> int:
    schemes = _parse_schemes(args.schemes)
    tensor = load_tensor(args.weights)
    results = []
    for scheme in schemes:
        quantized = apply_scheme(scheme, tensor)
        results.append(_scheme_entry(scheme, weight_error_report(tensor, quantized)))
    report = {
        "version": __version__,
        "command": "analyze",
        "tensor": {
            "name": tensor.name,
            "shape": list(tensor.shape),
            "count": tensor.count,
        },
        "results": results,
    }
    dump_report(report, args.out)
    print(f"wrote {args.out} ({len(results)} schemes)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# pareto
# ---------------------------------------------------------------------------


def _cost_key(scheme: QuantScheme) -> tuple[str, int, int, int]:
    if scheme.kind == "fxp":
        return ("fxp", 0, 0, scheme.fxp.m)
    if scheme.kind == "posit":
        return ("posit", scheme.posit.n, scheme.posit.es, 0)
    return (scheme.kind, scheme.posit.n - 1, scheme.posit.es, scheme.fxp.m)


def _cmd_pareto(args) -> int:
    costs_path = args.costs or os.environ.get("EXPAND_COSTS")
    if not costs_path:
        raise UsageError("no cost table: pass --costs or set EXPAND_COSTS")
    objectives = [o.strip() for o in args.objectives.split(",") if o.strip()]
    if not objectives:
        raise UsageError("need at least one objective")
    costs = load_cost_table(costs_path)

    report_dir = Path(args.reports)
    report_files = sorted(report_dir.glob("*.json"))
    if not report_files:
        raise TensorFormatError(f"no report files under {report_dir}")

    points: list[ParetoPoint] = []
    kinds: dict[str, str] = {}
    for path in report_files:
        report = load_report(path)
        for entry in report.get("results", []):
            scheme = QuantScheme.parse(entry["scheme"])
            key = _cost_key(scheme)
            if key not in costs:
                raise MissingCostRowError(
                    f"cost table has no row for {entry['scheme']} (key {key})"
                )
            pool: dict[str, float] = dict(entry["error"])
            pool["param_bits"] = float(entry["storage_bits"])
            pool.update(costs[key])
            missing = [o for o in objectives if o not in pool]
            if missing:
                raise UsageError(f"unknown objectives: {', '.join(missing)}")
            label = f"{path.stem}:{entry['scheme']}"
            points.append(ParetoPoint(label, {o: pool[o] for o in objectives}))
            kinds[label] = scheme.kind
    if not points:
        raise TensorFormatError("reports contained no scheme results")

    ref = reference_point(points)
    front = pareto_front(points)
    front_labels = {p.label for p in front}
    hv_all = hypervolume(front, ref)
    plain = [p for p in points if kinds[p.label] not in (POFX, FPF)]
    hv_plain = hypervolume(pareto_front(plain), ref) if plain else 0.0
    improvement = 0.0 if hv_plain == 0.0 else (hv_all - hv_plain) / hv_plain * 100.0

    report = {
        "version": __version__,
        "command": "pareto",
        "objectives": objectives,
        "reference_point": ref,
        "points": [
            {
                "label": p.label,
                "objectives": p.objectives,
                "on_front": p.label in front_labels,
            }
            for p in points
        ],
        "front": sorted(front_labels),
        "hypervolume": hv_all,
        "hypervolume_without_converted_schemes": hv_plain,
        "improvement_percent": improvement,
    }
    dump_report(report, args.out)
    print(f"wrote {args.out} (front {len(front)}/{len(points)}, "
          f"improvement {improvement:.1f}%)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def _parse_design(text: str, requant: str) -> AcceleratorDesign:
    parts = text.strip().split(":")
    try:
        kind, nums = parts[0], [int(x) for x in parts[1:]]
        if kind == "fxp" and len(nums) == 1:
            m = nums[0]
            return AcceleratorDesign(ACC_FXP_ONLY, FxpConfig(m, m - 1), requant=requant)
        if kind == "positall" and len(nums) == 3:
            n, es, m = nums
            return AcceleratorDesign(
                POSIT_ALL, FxpConfig(m, m - 1), PositConfig(n, es), requant
            )
        if kind in ("pofxmove", "pofxmovestore") and len(nums) == 3:
            stored, es, m = nums
            acc_kind = POFX_MOVE if kind == "pofxmove" else POFX_MOVE_STORE
            return AcceleratorDesign(
                acc_kind, FxpConfig(m, m - 1), PositConfig(stored + 1, es), requant
            )
    except ValueError as exc:
        raise UsageError(f"bad design spec {text!r}: {exc}") from exc
    raise UsageError(f"bad design spec {text!r}")


def _cmd_simulate(args) -> int:
    designs = [_parse_design(d, args.requant) for d in args.designs]
    weights = load_tensor(args.weights)
    activations = load_tensor(args.activations)
    comparison = compare_designs(designs, weights, activations.data)
    report = {
        "version": __version__,
        "command": "simulate",
        "weights": {"name": weights.name, "shape": list(weights.shape)},
        "batch": int(np.atleast_2d(activations.data).shape[0]),
        "comparison": comparison,
    }
    dump_report(report, args.out)
    print(f"wrote {args.out} ({len(designs)} designs)")
    return EXIT_OK


_HANDLERS = {
    "table": _cmd_table,
    "convert": _cmd_convert,
    "analyze": _cmd_analyze,
    "pareto": _cmd_pareto,
    "simulate": _cmd_simulate,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return _HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (TensorFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
