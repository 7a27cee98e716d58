"""Model registry: checkpoint references and expected embedding widths.

The four audited checkpoints are CLIP ViT-B/16 and ViT-B/32 (512-dim) and
the LAION-2B OpenCLIP ViT-L/14 (768) and ViT-H/14 (1024), all loaded through
the transformers CLIP classes. The registry is extensible; the built-in
``debug-hash-64`` entry is a dependency-free deterministic stand-in used by
tests and smoke runs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnknownModel


@dataclass(frozen=True)
class ModelSpec:
    model_id: str
    backend: str  # "transformers-clip" or "hash"
    checkpoint: str
    dim: int


_BUILTIN = (
    ModelSpec("clip-vit-b16", "transformers-clip", "openai/clip-vit-base-patch16", 512),
    ModelSpec("clip-vit-b32", "transformers-clip", "openai/clip-vit-base-patch32", 512),
    ModelSpec("openclip-vit-l14", "transformers-clip", "laion/CLIP-ViT-L-14-laion2B-s32B-b82K", 768),
    ModelSpec("openclip-vit-h14", "transformers-clip", "laion/CLIP-ViT-H-14-laion2B-s32B-b79K", 1024),
    ModelSpec("debug-hash-64", "hash", "content-hash", 64),
)

_REGISTRY: dict[str, ModelSpec] = {spec.model_id: spec for spec in _BUILTIN}


def get_model(model_id: str) -> ModelSpec:
    try:
        return _REGISTRY[model_id]
    except KeyError:
        raise UnknownModel(model_id, sorted(_REGISTRY)) from None


def register_model(spec: ModelSpec) -> None:
    _REGISTRY[spec.model_id] = spec


def registered_models() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))
