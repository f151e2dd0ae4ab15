"""Deterministic report files and the external hardware-cost table.

Reports are JSON with sorted keys and floats printed at 17 significant
digits, so identical inputs always produce byte-identical files and every
float round-trips exactly.

The cost table joins externally measured hardware numbers onto schemes.  It
is a CSV with header ``kind,n,es,m,pdp,luts,cpd,power``; ``n`` carries the
bit count as written in the scheme spec (full width for posit rows, stored
width for pofx/fpf rows) and unused fields are 0.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

COST_FIELDS = ("pdp", "luts", "cpd", "power")


class MissingCostRowError(KeyError):
    pass


def _encode(obj, indent: int) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for key in sorted(obj):
            if not isinstance(key, str):
                raise TypeError(f"report keys must be strings, got {key!r}")
            items.append(f'{pad}  {json.dumps(key)}: {_encode(obj[key], indent + 1)}')
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {_encode(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError("reports cannot carry NaN or infinity")
        return format(obj, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


def dump_report(report: dict, path: str | Path) -> None:
    Path(path).write_text(_encode(report, 0) + "\n")


def load_report(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())


def load_cost_table(path: str | Path) -> dict[tuple[str, int, int, int], dict[str, float]]:
    table: dict[tuple[str, int, int, int], dict[str, float]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"kind", "n", "es", "m", *COST_FIELDS}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ValueError(
                f"cost table needs columns kind,n,es,m,{','.join(COST_FIELDS)}"
            )
        for row in reader:
            key = (
                row["kind"].strip(),
                int(row["n"]),
                int(row["es"]),
                int(row["m"]),
            )
            table[key] = {name: float(row[name]) for name in COST_FIELDS}
    return table
