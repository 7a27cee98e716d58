"""Model-agnostic demographic bias audit engine for image-text embeddings.

Given per-model image and prompt embedding files with sidecar manifests, a
demographic label table, and a role taxonomy, the engine retrieves the top-k
most similar images per role prompt, converts hits into demographic
probability vectors, scores deviation from uniform baselines with the
Jensen-Shannon divergence, and compares skew and intersectional patterns
across models.
"""

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
from .audit import AuditConfig, BiasReport, ModelInput, run_audit
from .corpus import (
    EmbeddingMatrix,
    Label,
    LabelTable,
    Manifest,
    PlantedCorpusSpec,
    PlantedRole,
    SyntheticBundle,
    Taxonomy,
    consolidate_age,
    default_taxonomy,
    generate_synthetic_corpus,
    load_embeddings,
    load_labels,
    load_manifest,
    load_taxonomy,
    render_prompts,
    write_bundle,
    write_embeddings,
)
from .metrics import (
    BiasScore,
    LN2,
    ProbVector,
    demographic_distribution,
    js_bias_score,
    kl_divergence,
    prob_vector_from,
    uniform_baseline,
    uniform_like,
)
from .report import write_report
from .retrieval import (
    Hit,
    RetrievalResult,
    Retriever,
    cosine_similarity,
    normalize,
    top_k,
)

__all__ = [
    "AuditConfig",
    "BiasReport",
    "BiasScore",
    "EmbeddingMatrix",
    "Hit",
    "IntersectionFinding",
    "LN2",
    "Label",
    "LabelTable",
    "Manifest",
    "ModelInput",
    "ModelRoleStats",
    "PlantedCorpusSpec",
    "PlantedRole",
    "ProbVector",
    "RetrievalResult",
    "Retriever",
    "RoleAudit",
    "SkewFlag",
    "SyntheticBundle",
    "Taxonomy",
    "VolatilityEntry",
    "__version__",
    "average_across_models",
    "consolidate_age",
    "cosine_similarity",
    "default_taxonomy",
    "demographic_distribution",
    "dominant_category",
    "gender_volatility",
    "generate_synthetic_corpus",
    "js_bias_score",
    "kl_divergence",
    "load_embeddings",
    "load_labels",
    "load_manifest",
    "load_taxonomy",
    "mine_intersections",
    "normalize",
    "prob_vector_from",
    "render_prompts",
    "run_audit",
    "skew_flags",
    "top_k",
    "uniform_baseline",
    "uniform_like",
    "write_bundle",
    "write_embeddings",
    "write_report",
]
