"""Planted-bias synthetic corpus generator and its ground-truth contract."""

import numpy as np
import pytest

from embaudit import PlantedCorpusSpec, PlantedRole, generate_synthetic_corpus, write_bundle
from embaudit.corpus.labels import GENDERS, RACES
from embaudit.corpus.synthetic import counts_from_shares
from embaudit.errors import InvalidShares, SeedRequired, SyntheticSpecError
from conftest import brute_force_top_k


def one_role_spec(n=500, dim=8, k=50, female=0.9, gap=0.1):
    return PlantedCorpusSpec(
        n=n,
        dim=dim,
        k=k,
        roles=(
            PlantedRole(
                role="Nurse",
                gender_shares={"Female": female, "Male": 1.0 - female},
                race_shares={"Indian": 0.6, "White": 0.2, "Black": 0.2},
                age_shares={"Adult": 1.0},
            ),
        ),
        similarity_gap=gap,
    )


def test_planted_top_k_matches_brute_force_sort():
    spec = one_role_spec()
    bundle = generate_synthetic_corpus(spec, seed=7)
    ids, _ = brute_force_top_k(
        bundle.images.data, bundle.image_manifest.ids, bundle.prompts.data[0], spec.k
    )
    planted_ids = {bundle.image_manifest.ids[i] for i in bundle.planted_rows["Nurse"]}
    assert set(ids) == planted_ids
    labels = bundle.labels
    female = sum(1 for i in ids if labels[i].gender == "Female")
    assert female / spec.k == 0.9
    indian = sum(1 for i in ids if labels[i].race == "Indian")
    assert indian / spec.k == 0.6
    assert all(labels[i].age_bucket == "Adult" for i in ids)


def test_background_rows_have_zero_similarity():
    spec = one_role_spec(n=120, k=20)
    bundle = generate_synthetic_corpus(spec, seed=3)
    sims = bundle.images.data.astype(np.float64) @ bundle.prompts.data[0].astype(np.float64)
    planted = set(bundle.planted_rows["Nurse"])
    for row in range(spec.n):
        if row in planted:
            assert sims[row] >= spec.similarity_gap - 1e-6
        else:
            assert sims[row] == 0.0


def test_same_seed_bit_identical():
    spec = one_role_spec(n=200, k=20)
    a = generate_synthetic_corpus(spec, seed=7)
    b = generate_synthetic_corpus(spec, seed=7)
    assert a.images.data.tobytes() == b.images.data.tobytes()
    assert a.prompts.data.tobytes() == b.prompts.data.tobytes()
    assert a.image_manifest == b.image_manifest
    assert a.labels.to_dict() == b.labels.to_dict()
    assert a.planted_rows == b.planted_rows


def test_different_seed_differs():
    spec = one_role_spec(n=200, k=20)
    a = generate_synthetic_corpus(spec, seed=7)
    b = generate_synthetic_corpus(spec, seed=8)
    assert a.images.data.tobytes() != b.images.data.tobytes()


def test_seed_required():
    with pytest.raises(SeedRequired):
        generate_synthetic_corpus(one_role_spec(), seed=None)


def test_shares_exceeding_one_rejected():
    with pytest.raises(InvalidShares):
        generate_synthetic_corpus(
            PlantedCorpusSpec(
                n=100,
                dim=8,
                k=10,
                roles=(
                    PlantedRole(
                        role="X",
                        gender_shares={"Male": 0.5, "Female": 0.6},
                        race_shares={"Indian": 1.0},
                        age_shares={"Adult": 1.0},
                    ),
                ),
            ),
            seed=1,
        )


def test_negative_and_unknown_shares_rejected():
    with pytest.raises(InvalidShares):
        counts_from_shares({"Male": -0.1, "Female": 1.1}, 10, GENDERS)
    with pytest.raises(InvalidShares):
        counts_from_shares({"Klingon": 1.0}, 10, RACES)


def test_counts_from_shares_exact_and_total():
    counts = counts_from_shares({"Female": 0.9, "Male": 0.1}, 100, GENDERS)
    assert counts == {"Male": 10, "Female": 90}
    counts = counts_from_shares({"Indian": 0.6, "White": 0.2, "Black": 0.2}, 50, RACES)
    assert counts["Indian"] == 30 and counts["White"] == 10 and counts["Black"] == 10
    assert sum(counts.values()) == 50
    # Non-integral shares still sum to the total via largest remainder.
    counts = counts_from_shares({"Male": 1 / 3, "Female": 2 / 3}, 10, GENDERS)
    assert sum(counts.values()) == 10 and counts["Female"] == 7


def test_n_smaller_than_k_rejected():
    with pytest.raises(SyntheticSpecError):
        one_role_spec(n=40, k=50)


def test_dim_too_small_rejected():
    with pytest.raises(SyntheticSpecError):
        one_role_spec(dim=2)


def test_multi_role_planted_sets_are_disjoint_and_separated():
    spec = PlantedCorpusSpec(
        n=300,
        dim=10,
        k=30,
        roles=(
            PlantedRole(
                role="A",
                gender_shares={"Male": 1.0},
                race_shares={"Indian": 1.0},
                age_shares={"Adult": 1.0},
            ),
            PlantedRole(
                role="B",
                gender_shares={"Female": 1.0},
                race_shares={"White": 1.0},
                age_shares={"Old": 1.0},
            ),
        ),
    )
    bundle = generate_synthetic_corpus(spec, seed=11)
    rows_a = set(bundle.planted_rows["A"])
    rows_b = set(bundle.planted_rows["B"])
    assert not rows_a & rows_b
    for role, rows in (("A", rows_a), ("B", rows_b)):
        row_idx = bundle.prompt_manifest.ids.index(role)
        ids, _ = brute_force_top_k(
            bundle.images.data, bundle.image_manifest.ids, bundle.prompts.data[row_idx], spec.k
        )
        assert {bundle.image_manifest.ids[i] for i in rows} == set(ids)


def test_written_bundle_is_complete(tmp_path):
    bundle = generate_synthetic_corpus(one_role_spec(n=60, k=10), seed=5)
    paths = write_bundle(bundle, tmp_path / "bundle")
    for name in ("images", "prompts", "labels", "taxonomy", "config"):
        assert paths[name].exists(), name
    assert (tmp_path / "bundle" / "images.emb1.manifest.json").exists()
    assert (tmp_path / "bundle" / "prompts.emb1.manifest.json").exists()
