"""Encoder backends.

``TransformersClipEncoder`` wraps a pretrained CLIP checkpoint (transformers)
in deterministic eval mode with the checkpoint's own preprocessing.
``HashEncoder`` is a dependency-free deterministic stand-in: every input maps
to a vector seeded by a content hash, so outputs are reproducible, batch-size
invariant, and distinct per distinct input. Both return raw (unnormalized)
float32 embeddings; the pipeline normalizes before writing.
"""

from __future__ import annotations

import hashlib
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .errors import CheckpointUnavailable, UndecodableImage
from .registry import ModelSpec


class Encoder(Protocol):
    spec: ModelSpec

    def encode_images(self, paths: Sequence[Path], batch_size: int) -> np.ndarray: ...

    def encode_texts(self, texts: Sequence[str], batch_size: int) -> np.ndarray: ...

    def preprocess_description(self) -> str: ...


def _batched(items, batch_size: int):
    for start in range(0, len(items), batch_size):
        yield items[start : start + batch_size]


class HashEncoder:
    """Content-hash pseudo-embeddings; deterministic and trivially batch-invariant."""

    def __init__(self, spec: ModelSpec):
        self.spec = spec

    def _vector(self, payload: bytes) -> np.ndarray:
        digest = hashlib.blake2b(payload, digest_size=8).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "little"))
        return rng.standard_normal(self.spec.dim).astype(np.float32)

    def encode_images(self, paths: Sequence[Path], batch_size: int) -> np.ndarray:
        rows = []
        for batch in _batched(list(paths), batch_size):
            for path in batch:
                try:
                    data = Path(path).read_bytes()
                except OSError as exc:
                    raise UndecodableImage(str(path), str(exc)) from None
                rows.append(self._vector(b"image\x00" + data))
        return np.stack(rows) if rows else np.zeros((0, self.spec.dim), dtype=np.float32)

    def encode_texts(self, texts: Sequence[str], batch_size: int) -> np.ndarray:
        rows = [
            self._vector(b"text\x00" + text.encode("utf-8"))
            for batch in _batched(list(texts), batch_size)
            for text in batch
        ]
        return np.stack(rows) if rows else np.zeros((0, self.spec.dim), dtype=np.float32)

    def preprocess_description(self) -> str:
        return "blake2b(content)-seeded gaussian vector (debug backend, no decoding)"


class TransformersClipEncoder:
    """Pretrained CLIP checkpoint in eval mode with its published preprocessing."""

    def __init__(self, spec: ModelSpec):
        self.spec = spec
        try:
            import torch
            from transformers import CLIPModel, CLIPProcessor
        except ImportError as exc:
            raise CheckpointUnavailable(f"torch/transformers not installed: {exc}") from None
        try:
            self._model = CLIPModel.from_pretrained(spec.checkpoint)
            self._processor = CLIPProcessor.from_pretrained(spec.checkpoint)
        except Exception as exc:
            raise CheckpointUnavailable(
                f"cannot load checkpoint {spec.checkpoint!r}: {exc}"
            ) from None
        self._torch = torch
        self._model.eval()

    def _load_image(self, path: Path):
        from PIL import Image

        try:
            with Image.open(path) as img:
                return img.convert("RGB")
        except Exception as exc:
            raise UndecodableImage(str(path), str(exc)) from None

    def encode_images(self, paths: Sequence[Path], batch_size: int) -> np.ndarray:
        rows = []
        with self._torch.no_grad():
            for batch in _batched(list(paths), batch_size):
                images = [self._load_image(Path(p)) for p in batch]
                inputs = self._processor(images=images, return_tensors="pt")
                feats = self._model.get_image_features(**inputs)
                rows.append(feats.cpu().numpy().astype(np.float32))
        if not rows:
            return np.zeros((0, self.spec.dim), dtype=np.float32)
        return np.concatenate(rows, axis=0)

    def encode_texts(self, texts: Sequence[str], batch_size: int) -> np.ndarray:
        rows = []
        with self._torch.no_grad():
            for batch in _batched(list(texts), batch_size):
                inputs = self._processor(
                    text=list(batch), return_tensors="pt", padding=True, truncation=True
                )
                feats = self._model.get_text_features(**inputs)
                rows.append(feats.cpu().numpy().astype(np.float32))
        if not rows:
            return np.zeros((0, self.spec.dim), dtype=np.float32)
        return np.concatenate(rows, axis=0)

    def preprocess_description(self) -> str:
        image_processor = getattr(self._processor, "image_processor", None)
        name = type(image_processor).__name__ if image_processor else "unknown"
        return f"checkpoint-published preprocessing via {name} ({self.spec.checkpoint})"


def build_encoder(spec: ModelSpec) -> Encoder:
    if spec.backend == "hash":
        return HashEncoder(spec)
    if spec.backend == "transformers-clip":
        return TransformersClipEncoder(spec)
    raise CheckpointUnavailable(f"no backend named {spec.backend!r}")
