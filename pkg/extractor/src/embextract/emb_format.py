"""Writer for the audit engine's on-disk formats (EMB1 + sidecar manifest).

Implemented against the documented format so this package stays decoupled
from the engine's code: magic ``EMB1``, little-endian u32 version (=1),
u32 dim, u64 count, raw float32 rows, then a u64 checksum = 8-byte BLAKE2b
digest of the payload interpreted little-endian. The manifest sidecar at
``<name>.manifest.json`` carries model_id/kind/dim/count/ids plus the digest
hex; the extra ``metadata`` key (preprocessing provenance) is ignored by the
engine's loader.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path
from typing import Sequence

import numpy as np

MAGIC = b"EMB1"
VERSION = 1

_HEADER = struct.Struct("<4sIIQ")
_TRAILER = struct.Struct("<Q")


def write_embedding_file(path: str | Path, rows: np.ndarray) -> str:
    """Write float32 rows; returns the payload digest hex."""
    arr = np.ascontiguousarray(rows, dtype="<f4")
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
    count, dim = arr.shape
    payload = arr.tobytes()
    digest = hashlib.blake2b(payload, digest_size=8).digest()
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, dim, count))
        fh.write(payload)
        fh.write(_TRAILER.pack(int.from_bytes(digest, "little")))
    return digest.hex()


def manifest_path_for(embedding_path: str | Path) -> Path:
    path = Path(embedding_path)
    return path.with_name(path.name + ".manifest.json")


def write_manifest(
    embedding_path: str | Path,
    *,
    model_id: str,
    kind: str,
    dim: int,
    ids: Sequence[str],
    checksum: str,
    metadata: dict | None = None,
) -> Path:
    doc = {
        "model_id": model_id,
        "kind": kind,
        "dim": dim,
        "count": len(ids),
        "ids": list(ids),
        "checksum": checksum,
    }
    if metadata:
        doc["metadata"] = metadata
    path = manifest_path_for(embedding_path)
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return path
