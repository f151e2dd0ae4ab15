#!/usr/bin/env python3
"""Storage and traffic comparison of the four weight-handling designs.

Simulates a fully-connected 64x10 layer under a weight-stationary dataflow
and prints per-design payload-bit accounts, ratios against the fixed-point
baseline and the output digests (the two converted designs must agree
bit for bit).
"""

import argparse

import numpy as np

from positfx.accelerator import (
    ACC_FXP_ONLY,
    POFX_MOVE,
    POFX_MOVE_STORE,
    POSIT_ALL,
    AcceleratorDesign,
    compare_designs,
)
from positfx.analysis import LayerTensor
from positfx.fixedpoint import FxpConfig
from positfx.posit import PositConfig


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-in", type=int, default=64)
    parser.add_argument("--n-out", type=int, default=10)
    parser.add_argument("--batch", type=int, default=1000)
    parser.add_argument("--stored-bits", type=int, default=5,
                        help="compressed posit width for the converted designs")
    parser.add_argument("--es", type=int, default=0)
    parser.add_argument("--m", type=int, default=8)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    weights = LayerTensor(
        "fc",
        (args.n_in, args.n_out),
        rng.uniform(-0.4, 0.4, (args.n_in, args.n_out)),
    )
    batch = rng.uniform(-1.0, 1.0, (args.batch, args.n_in))

    fxp = FxpConfig(args.m, args.m - 1)
    posit = PositConfig(args.stored_bits + 1, args.es)
    designs = [
        AcceleratorDesign(ACC_FXP_ONLY, fxp),
        AcceleratorDesign(POSIT_ALL, fxp, PositConfig(args.stored_bits + 1, args.es)),
        AcceleratorDesign(POFX_MOVE, fxp, posit),
        AcceleratorDesign(POFX_MOVE_STORE, fxp, posit),
    ]
    report = compare_designs(designs, weights, batch)

    print(f"layer {args.n_in}x{args.n_out}, batch {args.batch}, "
          f"baseline {report['baseline']}\n")
    head = f"{'design':<22} {'stored':>8} {'moved':>8} {'st.ratio':>9} {'mv.ratio':>9} digest"
    print(head)
    for entry in report["designs"]:
        acc = entry["account"]
        print(
            f"{entry['design']:<22} {acc['weight_bits_stored']:>8} "
            f"{acc['weight_bits_moved']:>8} "
            f"{entry['stored_ratio_vs_baseline']:>9.3f} "
            f"{entry['moved_ratio_vs_baseline']:>9.3f} "
            f"{entry['output_digest'][:12]}"
        )


if __name__ == "__main__":
    main()
