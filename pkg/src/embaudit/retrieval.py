"""Exact cosine-similarity top-k retrieval.

All similarities are accumulated in float64 over the stored float32 data, and
ties are broken by ascending row index, so repeated runs (including parallel
ones merged per prompt) produce identical results. No approximate index: the
audit's validity depends on exactness, and exact scan is cheap at this scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus.embeddings import EmbeddingMatrix, row_norms
from .corpus.manifest import Manifest
from .errors import DimMismatch, KExceedsCorpus, KZero, RetrievalError

_SIM_SLACK = 1e-6  # |cosine| may exceed 1 by float error only


@dataclass(frozen=True)
class Hit:
    image_id: str
    similarity: float


@dataclass(frozen=True)
class RetrievalResult:
    """Ranked top-k hits for one (model, role) pair."""

    model_id: str
    role: str
    k: int
    hits: tuple[Hit, ...]

    def __post_init__(self):
        object.__setattr__(self, "hits", tuple(self.hits))
        if self.k < 1:
            raise KZero(f"k must be positive, got {self.k}")
        if len(self.hits) != self.k:
            raise RetrievalError(f"{len(self.hits)} hits for k={self.k}")
        sims = [h.similarity for h in self.hits]
        if any(abs(s) > 1.0 + _SIM_SLACK for s in sims):
            raise RetrievalError("similarity outside [-1, 1] beyond float slack")
        if any(a < b for a, b in zip(sims, sims[1:])):
            raise RetrievalError("similarities are not non-increasing")
        ids = [h.image_id for h in self.hits]
        if len(set(ids)) != len(ids):
            raise RetrievalError("duplicate image ids in hits")

    def image_ids(self) -> tuple[str, ...]:
        return tuple(h.image_id for h in self.hits)

    def to_json(self) -> dict:
        return {
            "model_id": self.model_id,
            "role": self.role,
            "k": self.k,
            "hits": [{"id": h.image_id, "sim": h.similarity} for h in self.hits],
        }


def normalize(matrix: EmbeddingMatrix) -> EmbeddingMatrix:
    """Rows divided by their Euclidean norm (norms taken in float64)."""
    if matrix.count == 0:
        return EmbeddingMatrix(
            dim=matrix.dim, count=0, data=matrix.data.copy(), normalized=True
        )
    norms = row_norms(matrix.data).astype(np.float32)
    data = matrix.data / norms[:, None]
    return EmbeddingMatrix(dim=matrix.dim, count=matrix.count, data=data, normalized=True)


def cosine_similarity(image_vec: np.ndarray, prompt_vec: np.ndarray) -> float:
    """Dot product of two unit vectors, accumulated in float64."""
    a = np.asarray(image_vec)
    b = np.asarray(prompt_vec)
    if a.shape != b.shape or a.ndim != 1:
        raise DimMismatch(f"vector shapes differ: {a.shape} vs {b.shape}")
    return float(np.dot(a.astype(np.float64), b.astype(np.float64)))


def _check_k(k: int, count: int) -> None:
    if k < 1:
        raise KZero(f"k must be positive, got {k}")
    if k > count:
        raise KExceedsCorpus(f"k={k} exceeds corpus size {count}")


def top_k_indices(similarities: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest similarities; ties broken by ascending index."""
    _check_k(k, len(similarities))
    # Stable sort of the negated scores keeps ascending index among ties.
    return np.argsort(-similarities, kind="stable")[:k]


class Retriever:
    """Per-corpus retrieval state: float64 view shared across prompts."""

    def __init__(self, images: EmbeddingMatrix, manifest: Manifest):
        if not images.normalized:
            raise RetrievalError("corpus must be normalized before retrieval")
        if manifest.count != images.count or manifest.dim != images.dim:
            raise DimMismatch(
                f"manifest {manifest.count}x{manifest.dim} does not match "
                f"matrix {images.count}x{images.dim}"
            )
        self.images = images
        self.manifest = manifest
        self._data64 = np.ascontiguousarray(images.data, dtype=np.float64)

    def similarities(self, prompt_vec: np.ndarray) -> np.ndarray:
        p = np.asarray(prompt_vec)
        if p.ndim != 1 or p.shape[0] != self.images.dim:
            raise DimMismatch(
                f"prompt has dim {p.shape[-1] if p.ndim else 0}, corpus has {self.images.dim}"
            )
        # einsum, not BLAS @: each row reduces independently in index order, so
        # bit-identical rows always get bit-identical scores (BLAS gemv kernels
        # accumulate differently depending on row position, which would turn
        # exact ties into ulp-level artifacts and break the tie rule).
        return np.einsum("ij,j->i", self._data64, p.astype(np.float64))

    def top_k(self, prompt_vec: np.ndarray, k: int, *, role: str) -> RetrievalResult:
        sims = self.similarities(prompt_vec)
        order = top_k_indices(sims, k)
        hits = tuple(
            Hit(image_id=self.manifest.ids[i], similarity=float(sims[i])) for i in order
        )
        return RetrievalResult(model_id=self.manifest.model_id, role=role, k=k, hits=hits)


def top_k(
    images: EmbeddingMatrix,
    manifest: Manifest,
    prompt_vec: np.ndarray,
    k: int,
    *,
    role: str,
) -> RetrievalResult:
    """The k rows most cosine-similar to the prompt, exact and deterministic."""
    return Retriever(images, manifest).top_k(prompt_vec, k, role=role)
