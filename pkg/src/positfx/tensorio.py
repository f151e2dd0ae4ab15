"""Tensor file formats owned by the command-line frontend.

A tensor is either

  * a JSON sidecar plus raw binary: the sidecar holds name, shape,
    dtype="f32" and byte_order="little"; the binary file (sidecar's "data"
    entry, default the same stem with a .bin suffix) holds the values as
    little-endian 32-bit floats in row-major order; or
  * a CSV file with one decimal value per line (1-D only).

NaN and infinity are rejected at load time.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .analysis import LayerTensor


class TensorFormatError(ValueError):
    pass


def load_tensor(path: str | Path) -> LayerTensor:
    path = Path(path)
    if path.suffix == ".json":
        return _load_sidecar(path)
    if path.suffix == ".csv":
        return _load_csv(path)
    raise TensorFormatError(f"unsupported tensor file {path.name!r} (use .json or .csv)")


def _load_sidecar(path: Path) -> LayerTensor:
    try:
        meta = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise TensorFormatError(f"bad sidecar {path}: {exc}") from exc
    for key in ("name", "shape", "dtype", "byte_order"):
        if key not in meta:
            raise TensorFormatError(f"sidecar {path} missing field {key!r}")
    if meta["dtype"] != "f32":
        raise TensorFormatError(f"unsupported dtype {meta['dtype']!r}")
    if meta["byte_order"] != "little":
        raise TensorFormatError(f"unsupported byte order {meta['byte_order']!r}")
    shape = tuple(int(d) for d in meta["shape"])
    data_path = path.with_name(meta.get("data", path.stem + ".bin"))
    raw = data_path.read_bytes()
    expected = 4 * int(np.prod(shape)) if shape else 4
    if len(raw) != expected:
        raise TensorFormatError(
            f"{data_path} holds {len(raw)} bytes, expected {expected}"
        )
    values = np.frombuffer(raw, dtype="<f4").astype(np.float64)
    if not np.all(np.isfinite(values)):
        raise TensorFormatError(f"{data_path} contains NaN or infinity")
    return LayerTensor(str(meta["name"]), shape, values.reshape(shape))


def _load_csv(path: Path) -> LayerTensor:
    values = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError as exc:
            raise TensorFormatError(f"{path}:{lineno}: {exc}") from exc
    arr = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise TensorFormatError(f"{path} contains NaN or infinity")
    return LayerTensor(path.stem, (len(values),), arr)


def save_tensor(tensor: LayerTensor, sidecar_path: str | Path) -> None:
    """Write the sidecar + raw binary pair next to each other."""
    sidecar_path = Path(sidecar_path)
    data_name = sidecar_path.stem + ".bin"
    meta = {
        "name": tensor.name,
        "shape": list(tensor.shape),
        "dtype": "f32",
        "byte_order": "little",
        "data": data_name,
    }
    sidecar_path.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    payload = tensor.data.astype("<f4").tobytes()
    sidecar_path.with_name(data_name).write_bytes(payload)
