"""Checkpoint file: magic "ONET40\\0", u16 version, u32 header length, a
structured-text header (spec fields, metadata, tensor table with shapes and
byte offsets), then raw little-endian float32 blobs in table order.
Round trips are bit-exact."""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .model import OilNet40, OilNet40Spec

MAGIC = b"ONET40\x00"
VERSION = 1


class CheckpointError(ValueError):
    pass


@dataclass
class Checkpoint:
    spec: OilNet40Spec
    tensors: dict[str, np.ndarray]
    meta: dict[str, str] = field(default_factory=dict)

    def build_model(self) -> OilNet40:
        model = OilNet40(self.spec, seed=int(self.meta.get("seed", "0")))
        model.load_tensors(self.tensors)
        return model

    @classmethod
    def from_model(cls, model: OilNet40, meta: dict | None = None) -> "Checkpoint":
        meta = {k: str(v) for k, v in (meta or {}).items()}
        meta.setdefault("seed", str(model.seed))
        tensors = {k: v.copy() for k, v in model.named_tensors().items()}
        return cls(model.spec, tensors, meta)


def save_checkpoint(ckpt: Checkpoint, path) -> None:
    lines = []
    for k, v in ckpt.spec.to_fields().items():
        lines.append(f"spec {k}={v}")
    for k, v in sorted(ckpt.meta.items()):
        lines.append(f"meta {k}={v}")
    offset = 0
    blobs = []
    for name, arr in ckpt.tensors.items():
        arr = np.ascontiguousarray(arr, dtype=np.float32)
        shape = ",".join(str(d) for d in arr.shape)
        lines.append(f"tensor {name} {shape} {offset}")
        blob = arr.astype("<f4").tobytes()
        blobs.append(blob)
        offset += len(blob)
    header = ("\n".join(lines) + "\n").encode("ascii")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<H", VERSION))
        f.write(struct.pack("<I", len(header)))
        f.write(header)
        for blob in blobs:
            f.write(blob)


def load_checkpoint(path) -> Checkpoint:
    with open(path, "rb") as f:
        raw = f.read()
    if raw[:7] != MAGIC:
        raise CheckpointError(f"{path}: bad checkpoint magic {raw[:7]!r}")
    (version,) = struct.unpack("<H", raw[7:9])
    if version != VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {version}")
    (header_len,) = struct.unpack("<I", raw[9:13])
    header = raw[13:13 + header_len].decode("ascii")
    blob_base = 13 + header_len
    spec_fields: dict[str, str] = {}
    meta: dict[str, str] = {}
    table: list[tuple[str, tuple[int, ...], int]] = []
    for line in header.splitlines():
        if not line.strip():
            continue
        kind, rest = line.split(" ", 1)
        if kind == "spec":
            k, v = rest.split("=", 1)
            spec_fields[k] = v
        elif kind == "meta":
            k, v = rest.split("=", 1)
            meta[k] = v
        elif kind == "tensor":
            name, shape_s, offset_s = rest.rsplit(" ", 2)
            shape = tuple(int(d) for d in shape_s.split(","))
            table.append((name, shape, int(offset_s)))
        else:
            raise CheckpointError(f"{path}: unknown header record {kind!r}")
    try:
        spec = OilNet40Spec.from_fields(spec_fields)
    except (KeyError, ValueError) as e:
        raise CheckpointError(f"{path}: bad spec header: {e}") from None
    tensors: dict[str, np.ndarray] = {}
    for name, shape, offset in table:
        count = int(np.prod(shape)) if shape else 1
        start = blob_base + offset
        end = start + 4 * count
        if end > len(raw):
            raise CheckpointError(f"{path}: truncated blob for tensor {name}")
        tensors[name] = np.frombuffer(raw[start:end], dtype="<f4").reshape(shape).copy()
    return Checkpoint(spec, tensors, meta)
