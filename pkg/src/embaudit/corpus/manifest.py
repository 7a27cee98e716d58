"""Sidecar manifests binding embedding rows to image files or role names.

A manifest lives next to its EMB1 file as ``<name>.manifest.json`` and holds:
``model_id``, ``kind`` ("image" or "prompt"), ``dim``, ``count``, ``ids``
(one string per row, in row order) and ``checksum`` (payload digest hex).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import ManifestInvalid, ManifestMissing

KINDS = ("image", "prompt")


@dataclass
class Manifest:
    model_id: str
    kind: str
    dim: int
    count: int
    ids: tuple[str, ...]
    checksum: str

    def __post_init__(self):
        self.ids = tuple(self.ids)
        if self.kind not in KINDS:
            raise ManifestInvalid(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.dim <= 0:
            raise ManifestInvalid(f"dim must be positive, got {self.dim}")
        if self.count < 0:
            raise ManifestInvalid(f"count must be non-negative, got {self.count}")
        if len(self.ids) != self.count:
            raise ManifestInvalid(
                f"manifest lists {len(self.ids)} ids for count {self.count}"
            )
        seen: set[str] = set()
        for image_id in self.ids:
            if image_id in seen:
                raise ManifestInvalid(f"duplicate id {image_id!r} in manifest")
            seen.add(image_id)
        if not isinstance(self.checksum, str) or len(self.checksum) != 16:
            raise ManifestInvalid(f"checksum must be a 16-char hex string, got {self.checksum!r}")
        try:
            int(self.checksum, 16)
        except ValueError:
            raise ManifestInvalid(f"checksum is not hex: {self.checksum!r}") from None

    def to_json(self) -> dict:
        return {
            "model_id": self.model_id,
            "kind": self.kind,
            "dim": self.dim,
            "count": self.count,
            "ids": list(self.ids),
            "checksum": self.checksum,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Manifest":
        missing = [k for k in ("model_id", "kind", "dim", "count", "ids", "checksum") if k not in doc]
        if missing:
            raise ManifestInvalid(f"manifest missing keys: {', '.join(missing)}")
        return cls(
            model_id=str(doc["model_id"]),
            kind=str(doc["kind"]),
            dim=int(doc["dim"]),
            count=int(doc["count"]),
            ids=tuple(str(i) for i in doc["ids"]),
            checksum=str(doc["checksum"]),
        )


def manifest_path_for(embedding_path: str | Path) -> Path:
    path = Path(embedding_path)
    return path.with_name(path.name + ".manifest.json")


def load_manifest(path: str | Path) -> Manifest:
    path = Path(path)
    if not path.exists():
        raise ManifestMissing(f"manifest not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestInvalid(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ManifestInvalid(f"{path}: manifest must be a JSON object")
    return Manifest.from_json(doc)


def write_manifest(path: str | Path, manifest: Manifest) -> None:
    Path(path).write_text(
        json.dumps(manifest.to_json(), indent=2) + "\n", encoding="utf-8"
    )
