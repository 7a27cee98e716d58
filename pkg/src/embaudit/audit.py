"""Audit pipeline: load -> normalize -> retrieve -> distributions -> analyses.

The pipeline is deterministic end to end: model order comes from the config,
role order from the taxonomy, and per-(model, role) work is independent, so
running with any worker count merges to identical results.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from ._version import __version__
from .analysis import (
    IntersectionFinding,
    ModelRoleStats,
    RoleAudit,
    SkewFlag,
    VolatilityEntry,
    average_across_models,
    dominant_category,
    gender_volatility,
    mine_intersections,
    skew_flags,
)
from .corpus.io import load_embeddings
from .corpus.labels import LabelTable, check_totality, parse_labels_csv
from .corpus.manifest import Manifest
from .corpus.taxonomy import Taxonomy, default_taxonomy, load_taxonomy
from .errors import ConfigError, KExceedsCorpus, KZero
from .metrics import (
    MARGINAL_DIMENSIONS,
    ProbVector,
    demographic_distribution,
    js_bias_score,
    uniform_like,
)
from .retrieval import Retriever, RetrievalResult, normalize

DEFAULT_K = 100
DEFAULT_THRESHOLD = 0.60
DEFAULT_FORMATS = ("json", "csv", "md")
KNOWN_FORMATS = ("json", "csv", "md")


@dataclass
class ModelInput:
    model_id: str
    images: Path
    prompts: Path
    # Paths as written in the config, echoed into reports for provenance.
    images_as_given: str = ""
    prompts_as_given: str = ""

    def __post_init__(self):
        self.images = Path(self.images)
        self.prompts = Path(self.prompts)
        self.images_as_given = self.images_as_given or str(self.images)
        self.prompts_as_given = self.prompts_as_given or str(self.prompts)


@dataclass
class AuditConfig:
    models: list[ModelInput]
    labels: Path
    taxonomy: Path | None = None  # None = built-in default taxonomy
    k: int = DEFAULT_K
    skew_threshold: float = DEFAULT_THRESHOLD
    out_dir: Path = Path("report")
    formats: tuple[str, ...] = DEFAULT_FORMATS
    workers: int = 1
    seed: int | None = None
    labels_as_given: str = ""
    taxonomy_as_given: str | None = None

    def __post_init__(self):
        self.labels = Path(self.labels)
        self.out_dir = Path(self.out_dir)
        self.labels_as_given = self.labels_as_given or str(self.labels)
        if self.taxonomy is not None:
            self.taxonomy = Path(self.taxonomy)
            self.taxonomy_as_given = self.taxonomy_as_given or str(self.taxonomy)
        self.formats = tuple(self.formats)
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if not 0.0 < self.skew_threshold <= 1.0:
            raise ConfigError(f"threshold must be in (0, 1], got {self.skew_threshold}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if not self.models:
            raise ConfigError("config needs at least one model entry")
        bad = [f for f in self.formats if f not in KNOWN_FORMATS]
        if bad:
            raise ConfigError(f"unknown report formats: {bad}")
        ids = [m.model_id for m in self.models]
        if len(set(ids)) != len(ids):
            raise ConfigError("model_id values must be unique")
        for m in self.models:
            if m.images == m.prompts:
                raise ConfigError(
                    f"model {m.model_id}: image and prompt paths must differ"
                )
        for attr in ("images", "prompts"):
            paths = [getattr(m, attr) for m in self.models]
            if len(set(paths)) != len(paths):
                raise ConfigError(f"{attr} paths must be distinct per model")

    def echo(self) -> dict:
        """Audit-relevant settings for the report; execution knobs (workers,
        out dir, formats) are excluded so they cannot perturb report bytes."""
        return {
            "taxonomy": self.taxonomy_as_given,
            "labels": self.labels_as_given,
            "models": [
                {
                    "model_id": m.model_id,
                    "images": m.images_as_given,
                    "prompts": m.prompts_as_given,
                }
                for m in self.models
            ],
            "k": self.k,
            "threshold": self.skew_threshold,
            "seed": self.seed,
        }

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "AuditConfig":
        path = Path(path)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from None
        if not isinstance(doc, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        base = path.parent

        def resolve(p: str) -> Path:
            q = Path(p)
            return q if q.is_absolute() else base / q

        if "labels" not in doc or "models" not in doc:
            raise ConfigError(f"{path}: config requires labels and models keys")
        models = []
        for entry in doc["models"]:
            for key in ("model_id", "images", "prompts"):
                if key not in entry:
                    raise ConfigError(f"{path}: model entry missing {key!r}")
            models.append(
                ModelInput(
                    model_id=str(entry["model_id"]),
                    images=resolve(str(entry["images"])),
                    prompts=resolve(str(entry["prompts"])),
                    images_as_given=str(entry["images"]),
                    prompts_as_given=str(entry["prompts"]),
                )
            )
        taxonomy = doc.get("taxonomy")
        kwargs = {
            "models": models,
            "labels": resolve(str(doc["labels"])),
            "labels_as_given": str(doc["labels"]),
            "taxonomy": resolve(str(taxonomy)) if taxonomy else None,
            "taxonomy_as_given": str(taxonomy) if taxonomy else None,
            "k": int(doc.get("k", DEFAULT_K)),
            "skew_threshold": float(doc.get("threshold", DEFAULT_THRESHOLD)),
            "out_dir": resolve(str(doc["out"])) if "out" in doc else Path("report"),
            "formats": tuple(doc.get("formats", DEFAULT_FORMATS)),
            "workers": int(doc.get("workers", 1)),
            "seed": doc.get("seed"),
        }
        for key, value in overrides.items():
            if value is not None:
                kwargs[key] = value
        return cls(**kwargs)


@dataclass
class ModelRunData:
    """Everything the report needs from one model's pass over the corpus."""

    model_id: str
    images_manifest: Manifest
    prompts_manifest: Manifest
    retrievals: dict[str, RetrievalResult]  # role -> result
    stats: dict[str, ModelRoleStats]  # role -> stats


@dataclass
class BiasReport:
    tool_version: str
    config: dict
    k: int
    skew_threshold: float
    models: list[str]
    roles: list[str]
    corpora: dict
    retrievals: dict
    per_model: dict
    averaged: dict
    skew: dict
    volatility: list[VolatilityEntry]
    intersections: list[IntersectionFinding]
    notes: dict = field(default_factory=dict)


def _role_vector(prompt_manifest: Manifest, taxonomy: Taxonomy) -> dict[str, int]:
    """Map canonical role -> prompt row, requiring exactly one row per role."""
    rows: dict[str, int] = {}
    for row, prompt_id in enumerate(prompt_manifest.ids):
        role = taxonomy.resolve(prompt_id)  # raises UnknownRole
        if role in rows:
            raise ConfigError(f"prompt manifest lists role {role!r} twice")
        rows[role] = row
    missing = [r for r in taxonomy.role_names() if r not in rows]
    if missing:
        raise ConfigError(f"prompt matrix missing roles: {missing}")
    return rows


def _process_model(
    model: ModelInput, taxonomy: Taxonomy, labels: LabelTable, k: int
) -> ModelRunData:
    images, images_manifest = load_embeddings(model.images)
    if images_manifest.kind != "image":
        raise ConfigError(f"{model.images}: expected an image manifest")
    if images_manifest.model_id != model.model_id:
        raise ConfigError(
            f"{model.images}: manifest model_id {images_manifest.model_id!r} "
            f"does not match config {model.model_id!r}"
        )
    prompts, prompts_manifest = load_embeddings(model.prompts)
    if prompts_manifest.kind != "prompt":
        raise ConfigError(f"{model.prompts}: expected a prompt manifest")
    if prompts_manifest.model_id != model.model_id:
        raise ConfigError(
            f"{model.prompts}: manifest model_id {prompts_manifest.model_id!r} "
            f"does not match config {model.model_id!r}"
        )
    if images.dim != prompts.dim:
        raise ConfigError(
            f"model {model.model_id}: image dim {images.dim} != prompt dim {prompts.dim}"
        )
    if k > images.count:
        raise KExceedsCorpus(
            f"model {model.model_id}: k={k} exceeds corpus size {images.count}"
        )
    check_totality(labels, images_manifest)
    role_rows = _role_vector(prompts_manifest, taxonomy)

    retriever = Retriever(normalize(images), images_manifest)
    prompt_matrix = normalize(prompts)
    retrievals: dict[str, RetrievalResult] = {}
    stats: dict[str, ModelRoleStats] = {}
    for role in taxonomy.role_names():
        result = retriever.top_k(prompt_matrix.data[role_rows[role]], k, role=role)
        dists = {
            dim: demographic_distribution(result, labels, dim)
            for dim in ("gender", "race", "age", "joint")
        }
        bias = {dim: js_bias_score(v, uniform_like(v)) for dim, v in dists.items()}
        retrievals[role] = result
        stats[role] = ModelRoleStats(
            gender=dists["gender"],
            race=dists["race"],
            age=dists["age"],
            joint=dists["joint"],
            bias=bias,
        )
    return ModelRunData(
        model_id=model.model_id,
        images_manifest=images_manifest,
        prompts_manifest=prompts_manifest,
        retrievals=retrievals,
        stats=stats,
    )


def _flags_for(stats_vectors: dict[str, ProbVector], threshold: float, role: str) -> list[SkewFlag]:
    flags: list[SkewFlag] = []
    for dim in MARGINAL_DIMENSIONS:
        vector = stats_vectors[dim]
        if threshold <= 1.0 / len(vector.categories):
            continue  # threshold not meaningful for this dimension
        flags.extend(skew_flags(vector, threshold, role=role))
    return flags


def run_audit(config: AuditConfig) -> BiasReport:
    """Execute the full audit described by the config; raises on any bad input."""
    if config.k < 1:
        raise KZero(f"k must be >= 1, got {config.k}")
    taxonomy = (
        load_taxonomy(config.taxonomy) if config.taxonomy is not None else default_taxonomy()
    )
    roles = list(taxonomy.role_names())
    labels = LabelTable(parse_labels_csv(config.labels))

    if config.workers > 1 and len(config.models) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            runs = list(
                pool.map(
                    lambda m: _process_model(m, taxonomy, labels, config.k),
                    config.models,
                )
            )
    else:
        runs = [_process_model(m, taxonomy, labels, config.k) for m in config.models]

    model_ids = [m.model_id for m in config.models]
    audits = {
        role: RoleAudit(role=role, per_model={run.model_id: run.stats[role] for run in runs})
        for role in roles
    }

    corpora = {
        run.model_id: {
            "images": {
                "path": model.images_as_given,
                "count": run.images_manifest.count,
                "dim": run.images_manifest.dim,
                "checksum": run.images_manifest.checksum,
            },
            "prompts": {
                "path": model.prompts_as_given,
                "count": run.prompts_manifest.count,
                "dim": run.prompts_manifest.dim,
                "checksum": run.prompts_manifest.checksum,
            },
        }
        for model, run in zip(config.models, runs)
    }
    retrievals = {
        run.model_id: {role: run.retrievals[role].to_json() for role in roles}
        for run in runs
    }

    per_model: dict = {}
    per_model_flags: dict = {}
    for run in runs:
        role_docs = {}
        flags: list[SkewFlag] = []
        for role in roles:
            stats = run.stats[role]
            vectors = {dim: stats.vector(dim) for dim in MARGINAL_DIMENSIONS}
            role_docs[role] = {
                "gender": vectors["gender"].as_mapping(),
                "race": vectors["race"].as_mapping(),
                "age": vectors["age"].as_mapping(),
                "bias_nats": {d: s.value for d, s in stats.bias.items()},
                "bias_normalized": {d: s.normalized for d, s in stats.bias.items()},
                "dominant": {d: dominant_category(v) for d, v in vectors.items()},
                "top_joint": dominant_category(stats.joint),
            }
            flags.extend(_flags_for(vectors, config.skew_threshold, role))
        per_model[run.model_id] = role_docs
        per_model_flags[run.model_id] = [_flag_doc(f) for f in flags]

    averaged: dict = {}
    averaged_flags: list[SkewFlag] = []
    for role in roles:
        means = average_across_models(audits[role])
        vectors = {dim: means[dim] for dim in MARGINAL_DIMENSIONS}
        scores = {dim: js_bias_score(v, uniform_like(v)) for dim, v in means.items()}
        averaged[role] = {
            "gender": vectors["gender"].as_mapping(),
            "race": vectors["race"].as_mapping(),
            "age": vectors["age"].as_mapping(),
            "bias_nats": {d: s.value for d, s in scores.items()},
            "bias_normalized": {d: s.normalized for d, s in scores.items()},
            "dominant": {d: dominant_category(v) for d, v in vectors.items()},
            "top_joint": dominant_category(means["joint"]),
        }
        averaged_flags.extend(_flags_for(means, config.skew_threshold, role))

    volatility = gender_volatility(audits.values()) if len(model_ids) >= 2 else []
    intersections = mine_intersections(audits.values())

    notes = {
        "log_base": "natural log (nats); bias_normalized = value / ln 2",
        "joint_dimension": "42-cell gender x race x age scoring is an extension "
        "beyond the three marginal dimensions",
        "volatility": "population standard deviation of male share across models"
        + ("" if len(model_ids) >= 2 else "; omitted (single model)"),
        "skew_rule": "flag categories with share >= threshold (inclusive); "
        "dimensions with threshold <= 1/C are skipped",
        "tie_breaks": "retrieval ties by ascending row index; argmax ties by "
        "canonical category order",
        "averaging": "unweighted mean of per-model share vectors",
    }

    return BiasReport(
        tool_version=__version__,
        config=config.echo(),
        k=config.k,
        skew_threshold=config.skew_threshold,
        models=model_ids,
        roles=roles,
        corpora=corpora,
        retrievals=retrievals,
        per_model=per_model,
        averaged=averaged,
        skew={"averaged": [_flag_doc(f) for f in averaged_flags], "per_model": per_model_flags},
        volatility=volatility,
        intersections=intersections,
        notes=notes,
    )


def _flag_doc(flag: SkewFlag) -> dict:
    return {
        "role": flag.role,
        "dimension": flag.dimension,
        "category": flag.category,
        "share": flag.share,
        "threshold": flag.threshold,
    }
