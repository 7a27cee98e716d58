"""Planted-bias synthetic corpora with analytically known top-k composition.

Construction: with R planted roles, prompt r is the standard basis vector
e_r and every image vector lives in span(e_0..e_{R-1}) + a noise subspace
spanned by the remaining coordinates. An image planted for role r is

    c * e_r + sqrt(1 - c^2) * u,    c in [gap, 0.98],  u a unit noise vector,

so its cosine against prompt r is exactly c and exactly 0 against every other
prompt. Background images are pure noise-subspace unit vectors: cosine exactly
0 against all prompts. The top-k set for each prompt is therefore exactly its
k planted rows, regardless of float rounding, which makes the demographic
composition of every retrieval analytically known.

Demographics inside a planted set follow the requested shares via
largest-remainder rounding, so at k retrieved images the reported share is
count/k with integer count = share*k (exact when share*k is integral).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ..errors import InvalidShares, SeedRequired, SyntheticSpecError
from .embeddings import EmbeddingMatrix
from .io import write_embeddings
from .labels import AGE_BUCKETS, GENDERS, RACES, RAW_AGE_BANDS, Label, LabelTable, write_labels_csv
from .manifest import Manifest
from .taxonomy import Category, Role, Taxonomy, write_taxonomy

_COSINE_HI = 0.98

# Bucket-level age shares map onto one representative raw band each.
_BUCKET_BAND = {"Young": "10-19", "Adult": "30-39", "Old": "60-69"}


@dataclass(frozen=True)
class PlantedRole:
    """Demographic composition planted into one role's top-k set."""

    role: str
    gender_shares: Mapping[str, float]
    race_shares: Mapping[str, float]
    age_shares: Mapping[str, float]


@dataclass(frozen=True)
class PlantedCorpusSpec:
    n: int
    dim: int
    k: int
    roles: tuple[PlantedRole, ...]
    similarity_gap: float = 0.1
    model_id: str = "synthetic"

    def __post_init__(self):
        object.__setattr__(self, "roles", tuple(self.roles))
        if self.k < 1:
            raise SyntheticSpecError(f"k must be positive, got {self.k}")
        if not self.roles:
            raise SyntheticSpecError("at least one planted role is required")
        if self.n < self.k * len(self.roles):
            raise SyntheticSpecError(
                f"n={self.n} too small for {len(self.roles)} disjoint planted sets of k={self.k}"
            )
        if self.dim < len(self.roles) + 2:
            raise SyntheticSpecError(
                f"dim={self.dim} too small; need >= {len(self.roles) + 2} "
                f"for {len(self.roles)} prompts plus noise"
            )
        if not 0.0 < self.similarity_gap <= 0.9:
            raise SyntheticSpecError(
                f"similarity_gap must be in (0, 0.9], got {self.similarity_gap}"
            )
        names = [r.role for r in self.roles]
        if len(set(names)) != len(names):
            raise SyntheticSpecError("planted role names must be unique")

    @classmethod
    def from_json(cls, doc: dict) -> "PlantedCorpusSpec":
        roles = tuple(
            PlantedRole(
                role=str(r["role"]),
                gender_shares=dict(r.get("gender_shares", {})),
                race_shares=dict(r.get("race_shares", {})),
                age_shares=dict(r.get("age_shares", {})),
            )
            for r in doc.get("roles", ())
        )
        return cls(
            n=int(doc["n"]),
            dim=int(doc["dim"]),
            k=int(doc["k"]),
            roles=roles,
            similarity_gap=float(doc.get("similarity_gap", 0.1)),
            model_id=str(doc.get("model_id", "synthetic")),
        )


@dataclass
class SyntheticBundle:
    spec: PlantedCorpusSpec
    seed: int
    images: EmbeddingMatrix
    image_manifest: Manifest
    labels: LabelTable
    prompts: EmbeddingMatrix
    prompt_manifest: Manifest
    taxonomy: Taxonomy
    # Ground truth: row indices whose vectors were planted for each role.
    planted_rows: dict[str, tuple[int, ...]] = field(default_factory=dict)


def counts_from_shares(
    shares: Mapping[str, float], total: int, categories: Sequence[str]
) -> dict[str, int]:
    """Integer counts summing to total, largest-remainder rounding.

    Raises InvalidShares on unknown categories, negative shares, or a share
    vector that does not sum to 1.
    """
    unknown = [c for c in shares if c not in categories]
    if unknown:
        raise InvalidShares(f"unknown categories in shares: {unknown}")
    if any(v < 0 for v in shares.values()):
        raise InvalidShares("shares must be non-negative")
    s = math.fsum(shares.values())
    if abs(s - 1.0) > 1e-9:
        raise InvalidShares(f"shares must sum to 1, got {s!r}")
    exact = {c: float(shares.get(c, 0.0)) * total for c in categories}
    counts = {c: math.floor(exact[c]) for c in categories}
    remaining = total - sum(counts.values())
    by_remainder = sorted(
        categories,
        key=lambda c: (-(exact[c] - counts[c]), categories.index(c)),
    )
    for c in by_remainder[:remaining]:
        counts[c] += 1
    return counts


def _assignment(
    shares: Mapping[str, float],
    total: int,
    categories: Sequence[str],
    rng: np.random.Generator,
) -> list[str]:
    counts = counts_from_shares(shares, total, categories)
    values: list[str] = []
    for c in categories:
        values.extend([c] * counts[c])
    return [values[i] for i in rng.permutation(total)]


def _age_assignment(
    shares: Mapping[str, float], total: int, rng: np.random.Generator
) -> list[str]:
    # Accept either raw bands or bucket names as keys.
    translated: dict[str, float] = {}
    for key, value in shares.items():
        band = _BUCKET_BAND.get(key, key)
        translated[band] = translated.get(band, 0.0) + value
    return _assignment(translated, total, RAW_AGE_BANDS, rng)


def _unit_noise(rng: np.random.Generator, rows: int, dims: int) -> np.ndarray:
    out = rng.standard_normal((rows, dims))
    norms = np.sqrt(np.einsum("ij,ij->i", out, out))
    for i in np.nonzero(norms < 1e-6)[0]:  # vanishing draws: essentially never
        while norms[i] < 1e-6:
            out[i] = rng.standard_normal(dims)
            norms[i] = math.sqrt(float(out[i] @ out[i]))
    return out / norms[:, None]


def generate_synthetic_corpus(spec: PlantedCorpusSpec, seed: int | None) -> SyntheticBundle:
    """Build a deterministic planted-bias bundle; bit-identical per seed."""
    if seed is None:
        raise SeedRequired("synthetic generation requires an explicit seed")
    rng = np.random.default_rng(seed)
    n, dim, k = spec.n, spec.dim, spec.k
    n_roles = len(spec.roles)
    noise_lo = n_roles  # noise subspace = columns [n_roles, dim)

    perm = rng.permutation(n)
    planted_rows = {
        planted.role: tuple(int(i) for i in perm[r * k : (r + 1) * k])
        for r, planted in enumerate(spec.roles)
    }
    background_rows = perm[n_roles * k :]

    data = np.zeros((n, dim), dtype=np.float64)
    for r, planted in enumerate(spec.roles):
        cosines = rng.uniform(spec.similarity_gap, _COSINE_HI, size=k)
        noise = _unit_noise(rng, k, dim - noise_lo)
        rows = np.array(planted_rows[planted.role], dtype=np.intp)
        data[rows, r] = cosines
        data[rows[:, None], np.arange(noise_lo, dim)[None, :]] = (
            np.sqrt(1.0 - cosines**2)[:, None] * noise
        )
    if len(background_rows):
        data[background_rows[:, None], np.arange(noise_lo, dim)[None, :]] = _unit_noise(
            rng, len(background_rows), dim - noise_lo
        )

    width = max(6, len(str(max(n - 1, 0))))
    ids = tuple(f"img{i:0{width}d}.jpg" for i in range(n))

    label_rows: dict[str, Label] = {}
    for planted in spec.roles:
        rows = planted_rows[planted.role]
        genders = _assignment(planted.gender_shares, k, GENDERS, rng)
        races = _assignment(planted.race_shares, k, RACES, rng)
        ages = _age_assignment(planted.age_shares, k, rng)
        for i, row in enumerate(rows):
            label_rows[ids[row]] = Label(gender=genders[i], race=races[i], raw_age=ages[i])
    if len(background_rows):
        g_idx = rng.integers(0, len(GENDERS), size=len(background_rows))
        r_idx = rng.integers(0, len(RACES), size=len(background_rows))
        a_idx = rng.integers(0, len(RAW_AGE_BANDS), size=len(background_rows))
        for j, row in enumerate(background_rows):
            label_rows[ids[row]] = Label(
                gender=GENDERS[g_idx[j]],
                race=RACES[r_idx[j]],
                raw_age=RAW_AGE_BANDS[a_idx[j]],
            )
    label_rows = {ids[i]: label_rows[ids[i]] for i in range(n)}

    images_f32 = data.astype(np.float32)
    images = EmbeddingMatrix(dim=dim, count=n, data=images_f32)
    image_manifest = Manifest(
        model_id=spec.model_id,
        kind="image",
        dim=dim,
        count=n,
        ids=ids,
        checksum=images.checksum(),
    )

    prompt_data = np.zeros((n_roles, dim), dtype=np.float32)
    for r in range(n_roles):
        prompt_data[r, r] = 1.0
    prompts = EmbeddingMatrix(dim=dim, count=n_roles, data=prompt_data)
    prompt_manifest = Manifest(
        model_id=spec.model_id,
        kind="prompt",
        dim=dim,
        count=n_roles,
        ids=tuple(p.role for p in spec.roles),
        checksum=prompts.checksum(),
    )

    taxonomy = Taxonomy(
        categories=(
            Category(name="Synthetic", roles=tuple(Role(p.role) for p in spec.roles)),
        )
    )
    return SyntheticBundle(
        spec=spec,
        seed=seed,
        images=images,
        image_manifest=image_manifest,
        labels=LabelTable(label_rows),
        prompts=prompts,
        prompt_manifest=prompt_manifest,
        taxonomy=taxonomy,
        planted_rows=planted_rows,
    )


def write_bundle(bundle: SyntheticBundle, out_dir: str | Path) -> dict[str, Path]:
    """Write a bundle as files loadable by the audit pipeline.

    Emits images.emb1, prompts.emb1 (plus sidecar manifests), labels.csv,
    taxonomy.json and a ready-to-run config.json with paths relative to the
    bundle directory.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "images": out / "images.emb1",
        "prompts": out / "prompts.emb1",
        "labels": out / "labels.csv",
        "taxonomy": out / "taxonomy.json",
        "config": out / "config.json",
    }
    write_embeddings(
        paths["images"],
        bundle.images.data,
        model_id=bundle.image_manifest.model_id,
        kind="image",
        ids=bundle.image_manifest.ids,
    )
    write_embeddings(
        paths["prompts"],
        bundle.prompts.data,
        model_id=bundle.prompt_manifest.model_id,
        kind="prompt",
        ids=bundle.prompt_manifest.ids,
    )
    write_labels_csv(paths["labels"], bundle.labels.to_dict())
    write_taxonomy(paths["taxonomy"], bundle.taxonomy)
    config = {
        "taxonomy": "taxonomy.json",
        "labels": "labels.csv",
        "k": bundle.spec.k,
        "models": [
            {
                "model_id": bundle.spec.model_id,
                "images": "images.emb1",
                "prompts": "prompts.emb1",
            }
        ],
    }
    paths["config"].write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")
    return paths
