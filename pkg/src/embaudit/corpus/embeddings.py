"""Binary embedding file format (EMB1) reader/writer.

Layout, all little-endian:

    bytes 0..3    magic ``EMB1``
    u32           format version (currently 1)
    u32           dim
    u64           count
    count*dim     raw IEEE-754 float32 values, row-major
    u64           content checksum of the float payload

The checksum is BLAKE2b with an 8-byte digest over the raw payload bytes; the
trailer stores the digest interpreted as a little-endian u64 (i.e. the digest
bytes verbatim). Sidecar manifests carry the same digest as a 16-char hex
string (``digest.hex()``).

Rows are stored exactly as produced; loading never normalizes, it only checks
that no row has a near-zero Euclidean norm (a zero row would make cosine
similarity undefined and silently dropping it would desynchronize the
manifest).
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import (
    BadMagic,
    ChecksumMismatch,
    DimensionZero,
    TrailingBytes,
    TruncatedPayload,
    VersionUnsupported,
    ZeroNormVector,
)

MAGIC = b"EMB1"
VERSION = 1
MIN_ROW_NORM = 1e-12

_HEADER = struct.Struct("<4sIIQ")
_TRAILER = struct.Struct("<Q")


def payload_digest(payload: bytes) -> bytes:
    """8-byte BLAKE2b digest of the raw float payload."""
    return hashlib.blake2b(payload, digest_size=8).digest()


def digest_to_hex(digest: bytes) -> str:
    return digest.hex()


def digest_to_u64(digest: bytes) -> int:
    return int.from_bytes(digest, "little")


@dataclass
class EmbeddingMatrix:
    """count x dim float32 matrix of embedding vectors.

    ``normalized`` records whether every row is unit length; it is set by
    :func:`embaudit.retrieval.normalize`, never by the loader.
    """

    dim: int
    count: int
    data: np.ndarray = field(repr=False)
    normalized: bool = False

    def __post_init__(self):
        if self.dim <= 0:
            raise DimensionZero(f"dim must be positive, got {self.dim}")
        if self.count < 0:
            raise TruncatedPayload(f"count must be non-negative, got {self.count}")
        data = np.ascontiguousarray(self.data, dtype=np.float32)
        if data.size != self.count * self.dim:
            raise TruncatedPayload(
                f"payload holds {data.size} floats, expected {self.count * self.dim}"
            )
        self.data = data.reshape(self.count, self.dim)
        norms = row_norms(self.data)
        if self.count:
            bad = int(np.argmin(norms))
            if norms[bad] < MIN_ROW_NORM:
                raise ZeroNormVector(bad)
        if self.normalized and self.count:
            if np.abs(norms - 1.0).max() > 1e-4:
                worst = int(np.abs(norms - 1.0).argmax())
                raise ZeroNormVector(
                    worst, f"row {worst} norm {norms[worst]:.6g} but normalized flag set"
                )

    def payload(self) -> bytes:
        return self.data.tobytes()

    def checksum(self) -> str:
        return digest_to_hex(payload_digest(self.payload()))


def row_norms(data: np.ndarray) -> np.ndarray:
    """Euclidean norm per row, accumulated in float64."""
    if data.size == 0:
        return np.zeros(data.shape[0], dtype=np.float64)
    return np.sqrt(np.einsum("ij,ij->i", data, data, dtype=np.float64))


def read_embedding_file(path: str | Path) -> tuple[EmbeddingMatrix, str]:
    """Read an EMB1 file; returns the matrix and the verified checksum hex."""
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        if raw[:4] != MAGIC[: len(raw)]:
            raise BadMagic(f"{path}: not an EMB1 file")
        raise TruncatedPayload(f"{path}: header truncated")
    magic, version, dim, count = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise BadMagic(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise VersionUnsupported(f"{path}: version {version} not supported")
    if dim == 0:
        raise DimensionZero(f"{path}: dim is zero")
    payload_len = count * dim * 4
    expected = _HEADER.size + payload_len + _TRAILER.size
    if len(raw) < expected:
        raise TruncatedPayload(
            f"{path}: file is {len(raw)} bytes, expected {expected}"
        )
    if len(raw) > expected:
        raise TrailingBytes(f"{path}: {len(raw) - expected} unexpected trailing bytes")
    payload = raw[_HEADER.size : _HEADER.size + payload_len]
    (stored,) = _TRAILER.unpack_from(raw, _HEADER.size + payload_len)
    digest = payload_digest(payload)
    if digest_to_u64(digest) != stored:
        raise ChecksumMismatch(
            f"{path}: stored checksum {stored:016x} does not match payload"
        )
    data = np.frombuffer(payload, dtype="<f4").astype(np.float32, copy=True)
    matrix = EmbeddingMatrix(dim=dim, count=count, data=data)
    return matrix, digest_to_hex(digest)


def write_embedding_file(path: str | Path, data: np.ndarray) -> str:
    """Write rows as an EMB1 file; returns the checksum hex."""
    path = Path(path)
    arr = np.ascontiguousarray(data, dtype="<f4")
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
    count, dim = arr.shape
    if dim == 0:
        raise DimensionZero("cannot write a matrix with dim 0")
    payload = arr.tobytes()
    digest = payload_digest(payload)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, dim, count))
        fh.write(payload)
        fh.write(_TRAILER.pack(digest_to_u64(digest)))
    return digest_to_hex(digest)
