"""Combined embedding-plus-manifest load/store operations."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

from ..errors import ManifestInvalid
from .embeddings import (
    EmbeddingMatrix,
    read_embedding_file,
    write_embedding_file,
)
from .manifest import Manifest, load_manifest, manifest_path_for, write_manifest


def load_embeddings(path: str | Path) -> tuple[EmbeddingMatrix, Manifest]:
    """Load an EMB1 file and its sidecar manifest, cross-checked.

    Verifies the payload checksum against both the binary trailer and the
    manifest, and that dim/count agree. Never normalizes.
    """
    path = Path(path)
    matrix, checksum = read_embedding_file(path)
    manifest = load_manifest(manifest_path_for(path))
    if manifest.dim != matrix.dim or manifest.count != matrix.count:
        raise ManifestInvalid(
            f"{path}: manifest says {manifest.count}x{manifest.dim}, "
            f"file holds {matrix.count}x{matrix.dim}"
        )
    if manifest.checksum != checksum:
        raise ManifestInvalid(
            f"{path}: manifest checksum {manifest.checksum} does not match "
            f"payload checksum {checksum}"
        )
    return matrix, manifest


def write_embeddings(
    path: str | Path,
    data: np.ndarray,
    *,
    model_id: str,
    kind: str,
    ids: Sequence[str],
) -> tuple[EmbeddingMatrix, Manifest]:
    """Write an EMB1 file plus sidecar manifest; returns what a reload yields."""
    path = Path(path)
    arr = np.ascontiguousarray(data, dtype=np.float32)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
    count, dim = arr.shape
    if len(ids) != count:
        raise ManifestInvalid(f"{len(ids)} ids supplied for {count} rows")
    checksum = write_embedding_file(path, arr)
    manifest = Manifest(
        model_id=model_id,
        kind=kind,
        dim=dim,
        count=count,
        ids=tuple(ids),
        checksum=checksum,
    )
    write_manifest(manifest_path_for(path), manifest)
    return EmbeddingMatrix(dim=dim, count=count, data=arr), manifest
