"""Cross-model analyses over per-role retrieval distributions.

Covers model-averaged distribution tables, dominance/skew flagging at a
configurable share threshold (inclusive, default 0.60), male-share volatility
across models (population standard deviation), and mining of the most
frequent joint gender x race x age cell per role with its recurrence across
models. All tie breaks use canonical category order; model averaging weighs
models equally rather than pooling raw retrieval counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AnalysisError,
    CategoryMismatch,
    EmptyModelSet,
    FewerThanTwoModels,
    ThresholdOutOfRange,
)
from .metrics import BiasScore, MARGINAL_DIMENSIONS, ProbVector

DEFAULT_SKEW_THRESHOLD = 0.60


@dataclass(frozen=True)
class ModelRoleStats:
    """Distributions and bias scores for one (model, role) pair."""

    gender: ProbVector
    race: ProbVector
    age: ProbVector
    joint: ProbVector
    bias: Mapping[str, BiasScore]

    def vector(self, dimension: str) -> ProbVector:
        try:
            return {
                "gender": self.gender,
                "race": self.race,
                "age": self.age,
                "joint": self.joint,
            }[dimension]
        except KeyError:
            raise AnalysisError(f"unknown dimension {dimension!r}") from None


@dataclass
class RoleAudit:
    """Per-model stats for one role; model order is the audit's config order."""

    role: str
    per_model: dict[str, ModelRoleStats] = field(default_factory=dict)

    def models(self) -> tuple[str, ...]:
        return tuple(self.per_model)


@dataclass(frozen=True)
class SkewFlag:
    role: str
    dimension: str
    category: str
    share: float
    threshold: float


@dataclass(frozen=True)
class VolatilityEntry:
    role: str
    male_shares: tuple[float, ...]
    stddev: float


@dataclass(frozen=True)
class IntersectionFinding:
    role: str
    combo: str  # joint cell, e.g. "Female|Black|Adult"
    models: tuple[str, ...]  # models whose top joint cell this is
    recurrence: int


def _mean_vectors(vectors: Sequence[ProbVector]) -> ProbVector:
    first = vectors[0]
    for v in vectors[1:]:
        if v.categories != first.categories:
            raise CategoryMismatch(
                f"cannot average {v.dimension} against {first.dimension}"
            )
    stacked = np.stack([v.p for v in vectors])
    return ProbVector(
        dimension=first.dimension,
        categories=first.categories,
        p=stacked.mean(axis=0),
    )


def average_across_models(audit: RoleAudit) -> dict[str, ProbVector]:
    """Unweighted mean of per-model distributions, per dimension."""
    if not audit.per_model:
        raise EmptyModelSet(f"role {audit.role!r} has no per-model stats")
    stats = list(audit.per_model.values())
    return {
        dim: _mean_vectors([s.vector(dim) for s in stats])
        for dim in ("gender", "race", "age", "joint")
    }


def skew_flags(vector: ProbVector, threshold: float, *, role: str) -> list[SkewFlag]:
    """Categories whose share meets the threshold (inclusive)."""
    c = len(vector.categories)
    if not (1.0 / c) < threshold <= 1.0:
        raise ThresholdOutOfRange(
            f"threshold must be in (1/{c}, 1], got {threshold}"
        )
    return [
        SkewFlag(
            role=role,
            dimension=vector.dimension,
            category=cat,
            share=float(share),
            threshold=threshold,
        )
        for cat, share in zip(vector.categories, vector.p)
        if share >= threshold
    ]


def dominant_category(vector: ProbVector) -> str:
    """Argmax category; ties go to the earliest canonical category."""
    return vector.categories[int(np.argmax(vector.p))]


def gender_volatility(audits: Iterable[RoleAudit]) -> list[VolatilityEntry]:
    """Per-role population stddev of male share, most volatile first."""
    entries = []
    for audit in audits:
        shares = tuple(
            float(stats.gender.share("Male")) for stats in audit.per_model.values()
        )
        if len(shares) < 2:
            raise FewerThanTwoModels(
                f"role {audit.role!r} has {len(shares)} model(s); volatility needs >= 2"
            )
        stddev = float(np.std(np.asarray(shares, dtype=np.float64)))
        entries.append(VolatilityEntry(role=audit.role, male_shares=shares, stddev=stddev))
    entries.sort(key=lambda e: (-e.stddev, e.role))
    return entries


def mine_intersections(audits: Iterable[RoleAudit]) -> list[IntersectionFinding]:
    """Most frequent joint cell per (role, model) and its cross-model recurrence."""
    findings: list[IntersectionFinding] = []
    combo_order: dict[str, int] = {}
    for audit in audits:
        top_by_model = {
            model: dominant_category(stats.joint)
            for model, stats in audit.per_model.items()
        }
        if not combo_order and audit.per_model:
            any_stats = next(iter(audit.per_model.values()))
            combo_order = {c: i for i, c in enumerate(any_stats.joint.categories)}
        seen: dict[str, list[str]] = {}
        for model, combo in top_by_model.items():
            seen.setdefault(combo, []).append(model)
        for combo, models in seen.items():
            findings.append(
                IntersectionFinding(
                    role=audit.role,
                    combo=combo,
                    models=tuple(models),
                    recurrence=len(models),
                )
            )
    findings.sort(key=lambda f: (-f.recurrence, f.role, combo_order.get(f.combo, 0)))
    return findings
