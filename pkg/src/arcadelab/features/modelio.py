"""Versioned binary container for preprocessing models.

Layout (all integers little-endian)::

    magic     4 bytes   b"ARCM"
    version   u16       FORMAT_VERSION
    kind      4 bytes   model type tag, e.g. b"BGND"
    meta_len  u32
    meta      meta_len bytes of UTF-8 JSON (sorted keys); includes an
              "arrays" list of {name, dtype, shape}
    payload   raw C-order array bytes, concatenated in "arrays" order

Writing the same model twice yields identical bytes.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"ARCM"
FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    pass


def dumps(kind: bytes, meta: dict, arrays: dict[str, np.ndarray]) -> bytes:
    if len(kind) != 4:
        raise ValueError("kind tag must be 4 bytes")
    specs = []
    chunks = []
    for name, arr in arrays.items():
        a = np.ascontiguousarray(arr)
        dt = a.dtype.newbyteorder("<") if a.dtype.byteorder == ">" else a.dtype
        a = a.astype(dt, copy=False)
        specs.append({"name": name, "dtype": dt.str, "shape": list(a.shape)})
        chunks.append(a.tobytes())
    header = dict(meta)
    header["arrays"] = specs
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    return MAGIC + struct.pack("<H", FORMAT_VERSION) + kind + struct.pack("<I", len(blob)) + blob + b"".join(chunks)


def loads(data: bytes, kind: bytes) -> tuple[dict, dict[str, np.ndarray]]:
    if data[:4] != MAGIC:
        raise ModelFormatError("not a model file")
    (version,) = struct.unpack("<H", data[4:6])
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model format version {version}")
    if data[6:10] != kind:
        raise ModelFormatError(f"expected model kind {kind!r}, found {data[6:10]!r}")
    (n,) = struct.unpack("<I", data[10:14])
    meta = json.loads(data[14:14 + n].decode())
    offset = 14 + n
    arrays = {}
    for entry in meta.pop("arrays"):
        dt = np.dtype(entry["dtype"])
        count = int(np.prod(entry["shape"], dtype=np.int64))
        size = count * dt.itemsize
        if offset + size > len(data):
            raise ModelFormatError("truncated model payload")
        arrays[entry["name"]] = np.frombuffer(data, dtype=dt, count=count, offset=offset).reshape(entry["shape"]).copy()
        offset += size
    if offset != len(data):
        raise ModelFormatError("trailing bytes after model payload")
    return meta, arrays


def save(path, kind: bytes, meta: dict, arrays: dict[str, np.ndarray]) -> Path:
    path = Path(path)
    path.write_bytes(dumps(kind, meta, arrays))
    return path


def load(path, kind: bytes) -> tuple[dict, dict[str, np.ndarray]]:
    return loads(Path(path).read_bytes(), kind)
