"""File formats and atomic writes.

Formats are the wire contracts of the lab: CSV with 12+ significant digits
for fields and curves (we emit 17, the float64 round-trip length), a small
binary format for dense kernels, coordinate text for sparse operators, and
canonical JSON (sorted keys) for reports so byte-identical reruns are
possible. All writes go through write-then-rename.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .geometry import DensityCurve, PointSet
from .grid import GridSpec
from .operator import DiscreteOperator
from .spectral import KernelMatrix
from .symbol import SymbolField

KERNEL_MAGIC = b"SPBKRN1\x00"


def atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def dump_json_report(path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")


# ---------------------------------------------------------------------------
# Kernels


def write_kernel_csv(path, kernel: KernelMatrix) -> None:
    """Rows 'i,j,k_ij' over all entries."""
    n = kernel.values.shape[0]
    lines = ["i,j,k_ij"]
    for i in range(n):
        row = kernel.values[i]
        lines.extend(f"{i},{j},{_fmt(row[j])}" for j in range(n))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_kernel_binary(path, kernel: KernelMatrix) -> None:
    """Magic 'SPBKRN1\\0', n as little-endian uint64, row-major float64 LE."""
    n = kernel.values.shape[0]
    payload = KERNEL_MAGIC + struct.pack("<Q", n) + kernel.values.astype("<f8").tobytes()
    atomic_write_bytes(path, payload)


def read_kernel_binary(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if data[:8] != KERNEL_MAGIC:
        raise ValueError("bad kernel magic")
    (n,) = struct.unpack("<Q", data[8:16])
    return np.frombuffer(data[16:], dtype="<f8").reshape(n, n).copy()


def write_kernel_diagonal_csv(path, kernel: KernelMatrix) -> None:
    """Rows 'x,k(x,x)' (coordinates per axis, then the diagonal value)."""
    grid = kernel.grid
    coords = grid.node_coords()
    diag = kernel.diagonal()
    header = ",".join(f"x{i}" for i in range(grid.dim)) + ",k_xx"
    lines = [header]
    for c, v in zip(coords, diag):
        lines.append(",".join(_fmt(x) for x in c) + "," + _fmt(v))
    atomic_write_text(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Operators and symbols


def write_operator_coo(path, op: DiscreteOperator) -> None:
    """'row col value' per line, 17 significant digits."""
    coo = op.matrix.tocoo()
    lines = [f"{r} {c} {_fmt(v)}" for r, c, v in zip(coo.row, coo.col, coo.data)]
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_symbol_csv(path, symbol: SymbolField) -> None:
    """Rows: node index, coordinates, matrix entries row-major."""
    grid = symbol.grid
    coords = grid.node_coords()
    flat = symbol.values.reshape(grid.size, -1)
    d = grid.dim
    header = (
        "index,"
        + ",".join(f"x{i}" for i in range(d))
        + ","
        + ",".join(f"a{i}{j}" for i in range(d) for j in range(d))
    )
    lines = [header]
    for idx in range(grid.size):
        parts = [str(idx)]
        parts.extend(_fmt(x) for x in coords[idx])
        parts.extend(_fmt(v) for v in flat[idx])
        lines.append(",".join(parts))
    atomic_write_text(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Point sets and curves


def write_pointset_csv(path, points: PointSet) -> None:
    seed = points.provenance.get("seed")
    grid = points.grid
    header = (
        f"# specband pointset v1 dim={grid.dim} L={_fmt(grid.length)} "
        f"seed={'none' if seed is None else seed}"
    )
    lines = [header]
    for c in points.coords:
        lines.append(",".join(_fmt(x) for x in c))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_pointset_csv(path, grid: GridSpec) -> PointSet:
    text = Path(path).read_text()
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("# specband pointset v1"):
        raise ValueError("not a specband pointset file")
    meta = dict(
        part.split("=", 1) for part in lines[0].split() if "=" in part
    )
    if int(meta["dim"]) != grid.dim:
        raise ValueError(f"pointset dim {meta['dim']} does not match grid dim {grid.dim}")
    if float(meta["L"]) != grid.length:
        raise ValueError("pointset L does not match grid length")
    coords = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    if coords.size == 0:
        coords = coords.reshape(0, grid.dim)
    seed = None if meta.get("seed") in (None, "none") else int(meta["seed"])
    return PointSet(grid=grid, coords=coords, provenance={"kind": "file", "seed": seed})


def write_density_curve_csv(path, curve: DensityCurve) -> None:
    lines = ["r,inf,sup"]
    for r, lo, hi in zip(curve.radii, curve.inf_values, curve.sup_values):
        lines.append(f"{_fmt(r)},{_fmt(lo)},{_fmt(hi)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_curve_csv(path, radii, values, value_name: str = "value") -> None:
    lines = [f"r,{value_name}"]
    for r, v in zip(radii, values):
        lines.append(f"{_fmt(r)},{_fmt(v)}")
    atomic_write_text(path, "\n".join(lines) + "\n")
