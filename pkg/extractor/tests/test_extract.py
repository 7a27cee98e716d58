"""Extraction pipeline behavior with the deterministic hash backend."""

import json

import numpy as np
import pytest

from embextract import (
    ModelSpec,
    UndecodableImage,
    UnknownModel,
    embed_images,
    embed_prompts,
    get_model,
    read_image_list,
    register_model,
    render_prompt,
    render_prompts,
    roles_from_taxonomy,
)
from embextract.encoders import HashEncoder
from embextract.errors import ExtractError
from conftest import write_list_csv, write_taxonomy_json


def _load_rows(path):
    raw = path.read_bytes()
    import struct

    _, _, dim, count = struct.unpack_from("<4sIIQ", raw, 0)
    return np.frombuffer(raw[20 : 20 + count * dim * 4], dtype="<f4").reshape(count, dim)


def test_rows_unit_norm_and_order(hash_spec, image_dir, tmp_path):
    root, names = image_dir
    result = embed_images(hash_spec, names, tmp_path / "img.emb1", root=root)
    assert result.count == len(names)
    assert result.dim == 64
    rows = _load_rows(result.embedding_path)
    norms = np.linalg.norm(rows.astype(np.float64), axis=1)
    assert np.abs(norms - 1.0).max() <= 1e-4
    manifest = json.loads(result.manifest_path.read_text(encoding="utf-8"))
    assert manifest["ids"] == list(names)  # manifest order equals input order
    assert manifest["kind"] == "image"
    assert manifest["metadata"]["backend"] == "hash"


def test_batch_size_invariance(hash_spec, image_dir, tmp_path):
    root, names = image_dir
    a = embed_images(hash_spec, names, tmp_path / "a.emb1", root=root, batch_size=1)
    b = embed_images(hash_spec, names, tmp_path / "b.emb1", root=root, batch_size=5)
    rows_a, rows_b = _load_rows(a.embedding_path), _load_rows(b.embedding_path)
    assert np.abs(rows_a - rows_b).max() <= 1e-5
    assert a.checksum == b.checksum  # hash backend is exactly invariant


def test_duplicate_image_rows_identical(hash_spec, image_dir, tmp_path):
    root, names = image_dir
    doubled = [names[0], names[1], names[0]]
    result = embed_images(hash_spec, doubled, tmp_path / "dup.emb1", root=root)
    rows = _load_rows(result.embedding_path).astype(np.float64)
    cos = float(rows[0] @ rows[2])
    assert cos == pytest.approx(1.0, abs=1e-5)


def test_empty_list_writes_valid_empty_file(hash_spec, tmp_path):
    result = embed_images(hash_spec, [], tmp_path / "none.emb1")
    assert result.count == 0
    rows = _load_rows(result.embedding_path)
    assert rows.shape == (0, 64)


def test_missing_image_raises_undecodable(hash_spec, tmp_path):
    with pytest.raises(UndecodableImage):
        embed_images(hash_spec, ["missing.jpg"], tmp_path / "x.emb1", root=tmp_path)


def test_unknown_model_rejected():
    with pytest.raises(UnknownModel):
        get_model("clip-vit-g14")


def test_registry_dims():
    assert get_model("clip-vit-b16").dim == 512
    assert get_model("clip-vit-b32").dim == 512
    assert get_model("openclip-vit-l14").dim == 768
    assert get_model("openclip-vit-h14").dim == 1024


def test_registry_extensible(tmp_path, image_dir):
    root, names = image_dir
    register_model(ModelSpec("test-hash-16", "hash", "content-hash", 16))
    result = embed_images(get_model("test-hash-16"), names[:2], tmp_path / "t.emb1", root=root)
    assert result.dim == 16


def test_dim_contract_enforced(image_dir, tmp_path):
    root, names = image_dir
    lying_spec = ModelSpec("liar", "hash", "content-hash", 32)
    encoder = HashEncoder(ModelSpec("liar", "hash", "content-hash", 24))
    with pytest.raises(ExtractError):
        embed_images(lying_spec, names[:2], tmp_path / "l.emb1", root=root, encoder=encoder)


def test_prompt_rendering_rule():
    assert render_prompt("Dentist") == "Photo of a dentist"
    assert render_prompt("Hospital Receptionist") == "Photo of a hospital receptionist"


def test_embed_prompts_roles_as_ids(hash_spec, tmp_path):
    taxonomy = write_taxonomy_json(tmp_path / "t.json", ["Nurse", "Surgeon", "Chemist"])
    prompts = render_prompts(roles_from_taxonomy(taxonomy))
    assert prompts[0] == ("Nurse", "Photo of a nurse")
    result = embed_prompts(hash_spec, prompts, tmp_path / "p.emb1")
    manifest = json.loads(result.manifest_path.read_text(encoding="utf-8"))
    assert manifest["ids"] == ["Nurse", "Surgeon", "Chemist"]
    assert manifest["kind"] == "prompt"
    assert result.count == 3


def test_single_prompt(hash_spec, tmp_path):
    result = embed_prompts(hash_spec, [("Nurse", "Photo of a nurse")], tmp_path / "one.emb1")
    assert result.count == 1 and result.dim == 64


def test_thirty_three_role_taxonomy_yields_33_rows(hash_spec, tmp_path):
    roles = [f"Role {i}" for i in range(33)]
    taxonomy = write_taxonomy_json(tmp_path / "t33.json", roles)
    prompts = render_prompts(roles_from_taxonomy(taxonomy))
    result = embed_prompts(hash_spec, prompts, tmp_path / "p33.emb1")
    assert result.count == 33


def test_prompts_deterministic_within_process(hash_spec, tmp_path):
    prompts = [("Nurse", "Photo of a nurse"), ("Surgeon", "Photo of a surgeon")]
    a = embed_prompts(hash_spec, prompts, tmp_path / "p1.emb1")
    b = embed_prompts(hash_spec, prompts, tmp_path / "p2.emb1")
    assert a.embedding_path.read_bytes() == b.embedding_path.read_bytes()


def test_read_image_list_variants(tmp_path):
    with_header = write_list_csv(tmp_path / "a.csv", ["val/1.jpg", "val/2.jpg"])
    assert read_image_list(with_header) == ["val/1.jpg", "val/2.jpg"]
    bare = write_list_csv(tmp_path / "b.csv", ["x.jpg", "y.jpg"], header=False)
    assert read_image_list(bare) == ["x.jpg", "y.jpg"]
    extra = tmp_path / "c.csv"
    extra.write_text("file,age\nval/9.jpg,20-29\n", encoding="utf-8")
    assert read_image_list(extra) == ["val/9.jpg"]
