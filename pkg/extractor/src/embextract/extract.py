"""Extraction pipeline: encode, L2-normalize, write EMB1 + manifest.

Rows are unit-normalized before writing so the audit engine's normalize pass
is a cheap verification. Manifest order always equals input order, and the
manifest records the backend and preprocessing recipe as metadata.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ._version import __version__
from .emb_format import write_embedding_file, write_manifest
from .encoders import Encoder, build_encoder
from .errors import ExtractError
from .registry import ModelSpec

DEFAULT_BATCH_SIZE = 32


@dataclass(frozen=True)
class ExtractResult:
    embedding_path: Path
    manifest_path: Path
    count: int
    dim: int
    checksum: str


def _normalize_rows(rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] == 0:
        return rows.astype(np.float32)
    norms = np.sqrt(np.einsum("ij,ij->i", rows, rows, dtype=np.float64))
    if np.any(norms < 1e-12):
        bad = int(np.argmin(norms))
        raise ExtractError(f"encoder produced a zero-norm embedding at row {bad}")
    return (rows / norms[:, None].astype(np.float32)).astype(np.float32)


def _write(
    out_path: Path,
    rows: np.ndarray,
    *,
    spec: ModelSpec,
    kind: str,
    ids: Sequence[str],
    encoder: Encoder,
    batch_size: int,
) -> ExtractResult:
    if rows.shape[0] != len(ids):
        raise ExtractError(f"{rows.shape[0]} embeddings for {len(ids)} ids")
    if rows.shape[0] and rows.shape[1] != spec.dim:
        raise ExtractError(
            f"{spec.model_id} produced dim {rows.shape[1]}, registry expects {spec.dim}"
        )
    normalized = _normalize_rows(rows) if rows.shape[0] else np.zeros((0, spec.dim), np.float32)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    checksum = write_embedding_file(out_path, normalized)
    manifest_path = write_manifest(
        out_path,
        model_id=spec.model_id,
        kind=kind,
        dim=spec.dim,
        ids=ids,
        checksum=checksum,
        metadata={
            "tool": f"embextract {__version__}",
            "backend": spec.backend,
            "checkpoint": spec.checkpoint,
            "preprocess": encoder.preprocess_description(),
            "batch_size": batch_size,
            "normalized": True,
        },
    )
    return ExtractResult(
        embedding_path=out_path,
        manifest_path=manifest_path,
        count=len(ids),
        dim=spec.dim,
        checksum=checksum,
    )


def embed_images(
    spec: ModelSpec,
    image_paths: Sequence[str],
    out_path: str | Path,
    *,
    root: str | Path | None = None,
    batch_size: int = DEFAULT_BATCH_SIZE,
    encoder: Encoder | None = None,
) -> ExtractResult:
    """Embed image files in list order; manifest ids are the paths as given."""
    encoder = encoder or build_encoder(spec)
    base = Path(root) if root is not None else None
    resolved = [base / p if base is not None else Path(p) for p in image_paths]
    rows = encoder.encode_images(resolved, batch_size)
    return _write(
        Path(out_path),
        rows,
        spec=spec,
        kind="image",
        ids=[str(p) for p in image_paths],
        encoder=encoder,
        batch_size=batch_size,
    )


def embed_prompts(
    spec: ModelSpec,
    prompts: Sequence[tuple[str, str]],
    out_path: str | Path,
    *,
    batch_size: int = DEFAULT_BATCH_SIZE,
    encoder: Encoder | None = None,
) -> ExtractResult:
    """Embed (role, prompt_text) pairs; manifest ids are the role names."""
    encoder = encoder or build_encoder(spec)
    rows = encoder.encode_texts([text for _, text in prompts], batch_size)
    return _write(
        Path(out_path),
        rows,
        spec=spec,
        kind="prompt",
        ids=[role for role, _ in prompts],
        encoder=encoder,
        batch_size=batch_size,
    )


def read_image_list(path: str | Path) -> list[str]:
    """Read an image list CSV: a ``file`` column if present, else column one."""
    rows: list[str] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            return rows
        if "file" in first:
            idx = first.index("file")
        else:
            idx = 0
            if first and first[idx].strip():
                rows.append(first[idx].strip())
        for line in reader:
            if line and line[idx].strip():
                rows.append(line[idx].strip())
    return rows
