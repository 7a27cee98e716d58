"""On-disk corpus data: embeddings, manifests, labels, taxonomy, synthesis."""

from .embeddings import (
    EmbeddingMatrix,
    MAGIC,
    MIN_ROW_NORM,
    VERSION,
    payload_digest,
    read_embedding_file,
    row_norms,
    write_embedding_file,
)
from .io import load_embeddings, write_embeddings
from .labels import (
    AGE_BUCKETS,
    GENDERS,
    RACES,
    RAW_AGE_BANDS,
    Label,
    LabelTable,
    check_totality,
    consolidate_age,
    load_labels,
    parse_labels_csv,
    write_labels_csv,
)
from .manifest import Manifest, load_manifest, manifest_path_for, write_manifest
from .synthetic import (
    PlantedCorpusSpec,
    PlantedRole,
    SyntheticBundle,
    counts_from_shares,
    generate_synthetic_corpus,
    write_bundle,
)
from .taxonomy import (
    PROMPT_PREFIX,
    Prompt,
    Role,
    Taxonomy,
    default_taxonomy,
    load_taxonomy,
    render_prompts,
    write_taxonomy,
)

__all__ = [
    "AGE_BUCKETS",
    "EmbeddingMatrix",
    "GENDERS",
    "Label",
    "LabelTable",
    "MAGIC",
    "MIN_ROW_NORM",
    "Manifest",
    "PROMPT_PREFIX",
    "PlantedCorpusSpec",
    "PlantedRole",
    "Prompt",
    "RACES",
    "RAW_AGE_BANDS",
    "Role",
    "SyntheticBundle",
    "Taxonomy",
    "VERSION",
    "check_totality",
    "consolidate_age",
    "counts_from_shares",
    "default_taxonomy",
    "generate_synthetic_corpus",
    "load_embeddings",
    "load_labels",
    "load_manifest",
    "load_taxonomy",
    "manifest_path_for",
    "parse_labels_csv",
    "payload_digest",
    "read_embedding_file",
    "render_prompts",
    "row_norms",
    "write_bundle",
    "write_embedding_file",
    "write_embeddings",
    "write_labels_csv",
    "write_manifest",
    "write_taxonomy",
]
