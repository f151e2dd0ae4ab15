#!/usr/bin/env python3
"""End-to-end design-space demo: analyze -> join costs -> Pareto report.

Builds a synthetic weight tensor and a small illustrative cost table in a
scratch directory, then drives the same code paths as the command line
(analyze + pareto) and prints the resulting front and hypervolume gain.
Cost numbers here are made up; real studies join measured tables.
"""

import argparse
import tempfile
from pathlib import Path

import numpy as np

from positfx.cli import main as cli
from positfx.reports import load_report

SCHEMES = ["fxp:8:7", "posit:6:1", "posit:8:2", "pofx:5:1:8", "pofx:7:2:8", "fpf:8:7:2"]

COSTS = """kind,n,es,m,pdp,luts,cpd,power
fxp,0,0,8,6460,90,3.2,0.48
posit,6,1,0,6000,177,5.1,0.62
posit,8,2,0,11614,267,6.0,0.80
pofx,5,1,8,5677,99,3.4,0.50
pofx,7,2,8,6508,104,3.5,0.52
fpf,7,2,8,6508,104,3.5,0.52
"""


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=20_000)
    parser.add_argument("--sigma", type=float, default=0.05)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        weights = tmp / "weights.csv"
        weights.write_text(
            "".join(
                f"{v}\n"
                for v in np.clip(rng.normal(0, args.sigma, args.count), -0.999, 0.999)
            )
        )
        costs = tmp / "costs.csv"
        costs.write_text(COSTS)
        reports = tmp / "reports"
        reports.mkdir()

        assert cli([
            "analyze", "--weights", str(weights), "--schemes", *SCHEMES,
            "--out", str(reports / "layer.json"),
        ]) == 0
        out = tmp / "pareto.json"
        assert cli([
            "pareto", "--reports", str(reports), "--costs", str(costs),
            "--objectives", "pdp,luts,avg_abs_error", "--out", str(out),
        ]) == 0

        report = load_report(out)
        print("\nobjectives:", ", ".join(report["objectives"]))
        print("front members:")
        for label in report["front"]:
            print("  ", label)
        print(f"hypervolume (all schemes):        {report['hypervolume']:.6g}")
        print(
            "hypervolume (without conversion): "
            f"{report['hypervolume_without_converted_schemes']:.6g}"
        )
        print(f"improvement: {report['improvement_percent']:.1f}%")


if __name__ == "__main__":
    main()
