"""Model-aware embedding extractor for the embaudit bias audit engine.

Loads a named pretrained vision-language checkpoint, embeds an ordered list
of face images plus the rendered role prompt set, and writes the audit
engine's EMB1 binary format with sidecar manifests (rows unit-normalized,
manifest order equal to input order, preprocessing recorded as metadata).
"""

from ._version import __version__
from .encoders import HashEncoder, TransformersClipEncoder, build_encoder
from .errors import CheckpointUnavailable, ExtractError, UndecodableImage, UnknownModel
from .extract import ExtractResult, embed_images, embed_prompts, read_image_list
from .prompts import render_prompt, render_prompts, roles_from_taxonomy
from .registry import ModelSpec, get_model, register_model, registered_models

__all__ = [
    "CheckpointUnavailable",
    "ExtractError",
    "ExtractResult",
    "HashEncoder",
    "ModelSpec",
    "TransformersClipEncoder",
    "UndecodableImage",
    "UnknownModel",
    "__version__",
    "build_encoder",
    "embed_images",
    "embed_prompts",
    "get_model",
    "read_image_list",
    "register_model",
    "registered_models",
    "render_prompt",
    "render_prompts",
    "roles_from_taxonomy",
]
