"""Matrix and component serialization.

Text format: first line "n_rows n_cols", then one "re im" pair per line,
entries in row-major order, printed with %.17g so values round-trip.

Binary format: 16-byte header (magic b"CSPC", then rows, cols, format
version as little-endian u32) followed by row-major little-endian
complex128 payload.

Circulant component lists go to JSON as [{"k": int, "first_row":
[[re, im], ...]}, ...].
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .core import ConfigError, as_complex_matrix
from .decomposition import CirculantComponent

__all__ = [
    "save_matrix_text",
    "load_matrix_text",
    "save_matrix_binary",
    "load_matrix_binary",
    "components_to_json",
    "components_from_json",
]

MAGIC = b"CSPC"
BINARY_VERSION = 1


def save_matrix_text(a, path) -> None:
    a = as_complex_matrix(a)
    with open(path, "w") as f:
        f.write(f"{a.shape[0]} {a.shape[1]}\n")
        for v in a.ravel():
            f.write(f"{v.real:.17g} {v.imag:.17g}\n")


def load_matrix_text(path) -> np.ndarray:
    with open(path) as f:
        header = f.readline().split()
        if len(header) != 2:
            raise ConfigError(f"bad matrix header in {path}")
        rows, cols = int(header[0]), int(header[1])
        data = np.empty(rows * cols, dtype=np.complex128)
        for i in range(rows * cols):
            parts = f.readline().split()
            if len(parts) != 2:
                raise ConfigError(f"truncated matrix data in {path} at entry {i}")
            data[i] = complex(float(parts[0]), float(parts[1]))
    return data.reshape(rows, cols)


def save_matrix_binary(a, path) -> None:
    a = as_complex_matrix(a)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<III", a.shape[0], a.shape[1], BINARY_VERSION))
        f.write(np.ascontiguousarray(a, dtype="<c16").tobytes())


def load_matrix_binary(path) -> np.ndarray:
    with open(path, "rb") as f:
        header = f.read(16)
        if len(header) != 16 or header[:4] != MAGIC:
            raise ConfigError(f"{path} is not a matrix file (bad magic)")
        rows, cols, version = struct.unpack("<III", header[4:])
        if version != BINARY_VERSION:
            raise ConfigError(f"unsupported matrix format version {version}")
        payload = f.read()
    expected = rows * cols * 16
    if len(payload) != expected:
        raise ConfigError(f"{path} payload is {len(payload)} bytes, expected {expected}")
    return np.frombuffer(payload, dtype="<c16").astype(np.complex128).reshape(rows, cols)


def components_to_json(components) -> str:
    out = []
    for comp in components:
        out.append(
            {
                "k": int(comp.k),
                "first_row": [[float(v.real), float(v.imag)] for v in comp.first_row],
            }
        )
    return json.dumps(out)


def components_from_json(text: str) -> list[CirculantComponent]:
    raw = json.loads(text)
    comps = []
    for item in raw:
        row = np.array([complex(re, im) for re, im in item["first_row"]], dtype=np.complex128)
        comps.append(CirculantComponent(int(item["k"]), row))
    return comps
