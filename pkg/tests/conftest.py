"""Shared fixtures and independent oracles used across the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from embaudit import EmbeddingMatrix, Manifest, write_embeddings
from embaudit.corpus.labels import Label


def brute_force_top_k(data: np.ndarray, ids, prompt: np.ndarray, k: int):
    """Full-sort retrieval oracle, independent of the engine's code path.

    Similarities row by row via np.dot in float64 (content-deterministic, so
    duplicate rows tie exactly); selection via Python sort on
    (-similarity, row index), i.e. descending score with ascending-index ties.
    """
    rows = np.asarray(data, dtype=np.float64)
    p = np.asarray(prompt, dtype=np.float64)
    sims = [float(np.dot(rows[i], p)) for i in range(rows.shape[0])]
    order = sorted(range(len(sims)), key=lambda i: (-sims[i], i))[:k]
    return [ids[i] for i in order], [sims[i] for i in order]


def matrix_from(rows) -> EmbeddingMatrix:
    data = np.asarray(rows, dtype=np.float32)
    return EmbeddingMatrix(dim=data.shape[1], count=data.shape[0], data=data)


def manifest_for(matrix: EmbeddingMatrix, *, model_id="m", kind="image", ids=None) -> Manifest:
    ids = ids if ids is not None else tuple(f"img{i}.jpg" for i in range(matrix.count))
    return Manifest(
        model_id=model_id,
        kind=kind,
        dim=matrix.dim,
        count=matrix.count,
        ids=tuple(ids),
        checksum=matrix.checksum(),
    )


def write_corpus(path, data, *, model_id="m", kind="image", ids=None):
    data = np.asarray(data, dtype=np.float32)
    ids = ids if ids is not None else tuple(f"img{i}.jpg" for i in range(data.shape[0]))
    return write_embeddings(path, data, model_id=model_id, kind=kind, ids=ids)


def label_csv_text(rows: dict[str, Label]) -> str:
    lines = ["file,age,gender,race"]
    for image_id, label in rows.items():
        lines.append(f"{image_id},{label.raw_age},{label.gender},{label.race}")
    return "\n".join(lines) + "\n"


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
