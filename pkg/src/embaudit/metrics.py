"""Demographic probability vectors and Jensen-Shannon bias scores.

A retrieval's demographic distribution is the per-category share of its k
hits. Bias against the uniform baseline (1/C per category) is scored with the
Jensen-Shannon divergence

    bias(p, b) = 0.5 * KL(p || m) + 0.5 * KL(b || m),   m = (p + b) / 2,

computed in nats with the 0*ln(0) := 0 convention. The mixture m keeps every
denominator positive, so the score is finite for degenerate p and bounded by
ln 2. Reports also carry value/ln2 as a normalized [0, 1] reading so results
stay comparable if another log base is assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .corpus.labels import AGE_BUCKETS, GENDERS, RACES, LabelTable
from .errors import CategoryMismatch, CZero, MetricError, MissingLabel, UnsupportedZeroDenominator
from .retrieval import RetrievalResult

LN2 = math.log(2.0)

JOINT_SEPARATOR = "|"

# Joint cells in gender-major, then race, then age order: 2*7*3 = 42.
JOINT_CELLS = tuple(
    f"{g}{JOINT_SEPARATOR}{r}{JOINT_SEPARATOR}{a}"
    for g in GENDERS
    for r in RACES
    for a in AGE_BUCKETS
)

CATEGORY_SETS: dict[str, tuple[str, ...]] = {
    "gender": GENDERS,
    "race": RACES,
    "age": AGE_BUCKETS,
    "joint": JOINT_CELLS,
}

DIMENSIONS = tuple(CATEGORY_SETS)
MARGINAL_DIMENSIONS = ("gender", "race", "age")

_SUM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ProbVector:
    """Probability vector over a fixed, ordered category list."""

    dimension: str
    categories: tuple[str, ...]
    p: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "categories", tuple(self.categories))
        p = np.asarray(self.p, dtype=np.float64)
        if p.ndim != 1 or p.shape[0] != len(self.categories):
            raise MetricError(
                f"{p.shape} values for {len(self.categories)} categories"
            )
        if len(self.categories) == 0:
            raise CZero("probability vector needs at least one category")
        if self.dimension in CATEGORY_SETS and self.categories != CATEGORY_SETS[self.dimension]:
            raise CategoryMismatch(
                f"dimension {self.dimension!r} requires the canonical category order"
            )
        if np.any(p < 0):
            raise MetricError("probabilities must be non-negative")
        total = float(np.sum(p))
        if abs(total - 1.0) > _SUM_TOL:
            raise MetricError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "p", p)

    def share(self, category: str) -> float:
        try:
            return float(self.p[self.categories.index(category)])
        except ValueError:
            raise CategoryMismatch(f"no category {category!r} in {self.dimension}") from None

    def as_mapping(self) -> dict[str, float]:
        return {c: float(v) for c, v in zip(self.categories, self.p)}


@dataclass(frozen=True)
class BiasScore:
    """JS divergence from baseline, in nats; 0 = balanced, ln 2 = maximal."""

    value: float

    def __post_init__(self):
        if not 0.0 <= self.value <= LN2 + 1e-12:
            raise MetricError(f"bias score {self.value!r} outside [0, ln 2]")

    @property
    def normalized(self) -> float:
        return self.value / LN2


def uniform_baseline(c: int, *, dimension: str | None = None) -> ProbVector:
    """Equal-share baseline with C categories.

    For C matching a known dimension (2 gender, 3 age, 7 race, 42 joint) the
    canonical categories are used; otherwise generic labels are generated.
    """
    if c < 1:
        raise CZero(f"C must be positive, got {c}")
    if dimension is None:
        by_size = {len(cats): dim for dim, cats in CATEGORY_SETS.items()}
        dimension = by_size.get(c, f"uniform{c}")
    categories = CATEGORY_SETS.get(dimension)
    if categories is None:
        categories = tuple(f"cat{i}" for i in range(c))
    elif len(categories) != c:
        raise CategoryMismatch(
            f"dimension {dimension!r} has {len(categories)} categories, not {c}"
        )
    return ProbVector(dimension=dimension, categories=categories, p=np.full(c, 1.0 / c))


def uniform_like(p: ProbVector) -> ProbVector:
    return ProbVector(
        dimension=p.dimension,
        categories=p.categories,
        p=np.full(len(p.categories), 1.0 / len(p.categories)),
    )


def _check_same_categories(p: ProbVector, q: ProbVector) -> None:
    if p.categories != q.categories:
        raise CategoryMismatch(
            f"category mismatch: {p.dimension}/{len(p.categories)} vs "
            f"{q.dimension}/{len(q.categories)}"
        )


def kl_divergence(p: ProbVector, q: ProbVector) -> float:
    """KL(p || q) in nats with 0*ln(0/q) := 0; q must cover p's support."""
    _check_same_categories(p, q)
    pv, qv = p.p, q.p
    support = pv > 0.0
    if np.any(qv[support] == 0.0):
        raise UnsupportedZeroDenominator(
            "KL undefined: q has zero mass where p does not"
        )
    terms = pv[support] * np.log(pv[support] / qv[support])
    return float(np.sum(terms))


def js_bias_score(p: ProbVector, b: ProbVector) -> BiasScore:
    """Jensen-Shannon divergence between p and baseline b, in nats."""
    _check_same_categories(p, b)
    m = ProbVector(dimension=p.dimension, categories=p.categories, p=(p.p + b.p) / 2.0)
    value = 0.5 * kl_divergence(p, m) + 0.5 * kl_divergence(b, m)
    if -1e-12 <= value < 0.0:  # float cancellation on near-identical inputs
        value = 0.0
    return BiasScore(value)


def _category_of(label, dimension: str) -> str:
    if dimension == "gender":
        return label.gender
    if dimension == "race":
        return label.race
    if dimension == "age":
        return label.age_bucket
    if dimension == "joint":
        return f"{label.gender}{JOINT_SEPARATOR}{label.race}{JOINT_SEPARATOR}{label.age_bucket}"
    raise MetricError(f"unknown dimension {dimension!r}")


def demographic_distribution(
    result: RetrievalResult, labels: LabelTable, dimension: str
) -> ProbVector:
    """Per-category share of the retrieval's k hits (counts / k)."""
    categories = CATEGORY_SETS.get(dimension)
    if categories is None:
        raise MetricError(f"unknown dimension {dimension!r}")
    index = {c: i for i, c in enumerate(categories)}
    counts = np.zeros(len(categories), dtype=np.int64)
    for hit in result.hits:
        label = labels[hit.image_id]  # raises MissingLabel
        counts[index[_category_of(label, dimension)]] += 1
    return ProbVector(
        dimension=dimension, categories=categories, p=counts / float(result.k)
    )


def prob_vector_from(
    dimension: str, values: Sequence[float] | Mapping[str, float]
) -> ProbVector:
    """Build a canonical-order vector from a list or category->share mapping."""
    categories = CATEGORY_SETS.get(dimension)
    if categories is None:
        raise MetricError(f"unknown dimension {dimension!r}")
    if isinstance(values, Mapping):
        unknown = [c for c in values if c not in categories]
        if unknown:
            raise CategoryMismatch(f"unknown categories for {dimension}: {unknown}")
        p = np.array([float(values.get(c, 0.0)) for c in categories])
    else:
        if len(values) != len(categories):
            raise CategoryMismatch(
                f"{len(values)} values for {len(categories)} {dimension} categories"
            )
        p = np.asarray(list(values), dtype=np.float64)
    return ProbVector(dimension=dimension, categories=categories, p=p)
