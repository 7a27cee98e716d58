from __future__ import annotations

import json

import numpy as np
import pytest

from embextract import get_model


@pytest.fixture
def hash_spec():
    return get_model("debug-hash-64")


@pytest.fixture
def image_dir(tmp_path):
    """A handful of small distinct binary files standing in for images."""
    rng = np.random.default_rng(7)
    root = tmp_path / "faces"
    root.mkdir()
    names = []
    for i in range(6):
        name = f"val/{i}.jpg" if i % 2 else f"train/{i}.jpg"
        path = root / name
        path.parent.mkdir(exist_ok=True)
        path.write_bytes(rng.bytes(64) + bytes([i]))
        names.append(name)
    return root, names


def write_list_csv(path, names, header=True):
    lines = (["file"] if header else []) + list(names)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_taxonomy_json(path, roles):
    doc = {"categories": [{"name": "Synthetic", "roles": list(roles)}]}
    path.write_text(json.dumps(doc, indent=2), encoding="utf-8")
    return path
