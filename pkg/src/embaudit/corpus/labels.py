"""Demographic label ingestion and age-band consolidation.

Labels arrive as a UTF-8 CSV with header columns ``file,age,gender,race``
(extra columns such as ``service_test`` are tolerated and ignored). Category
vocabularies are closed: two genders, seven races, nine raw age bands. The
nine bands consolidate into three buckets: 0-19 young, 20-49 adult, 50+ old.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Mapping

from ..errors import (
    DuplicateRow,
    LabelError,
    MissingLabel,
    UnknownAgeBand,
    UnknownGender,
    UnknownRace,
)
from .manifest import Manifest

GENDERS = ("Male", "Female")

# Canonical race order: the order reported alongside retrieval shares.
RACES = (
    "East Asian",
    "Indian",
    "Black",
    "White",
    "Middle Eastern",
    "Latino_Hispanic",
    "Southeast Asian",
)

RAW_AGE_BANDS = ("0-2", "3-9", "10-19", "20-29", "30-39", "40-49", "50-59", "60-69", "70+")

AGE_BUCKETS = ("Young", "Adult", "Old")

# Some label exports spell the open-ended band out; normalize it on ingest.
_AGE_BAND_ALIASES = {"more than 70": "70+"}

_AGE_TO_BUCKET = {
    "0-2": "Young",
    "3-9": "Young",
    "10-19": "Young",
    "20-29": "Adult",
    "30-39": "Adult",
    "40-49": "Adult",
    "50-59": "Old",
    "60-69": "Old",
    "70+": "Old",
}

REQUIRED_COLUMNS = ("file", "age", "gender", "race")


def consolidate_age(raw_age: str) -> str:
    """Map one of the nine raw bands onto Young/Adult/Old."""
    try:
        return _AGE_TO_BUCKET[raw_age]
    except KeyError:
        raise UnknownAgeBand(raw_age) from None


@dataclass(frozen=True)
class Label:
    gender: str
    race: str
    raw_age: str

    @property
    def age_bucket(self) -> str:
        return _AGE_TO_BUCKET[self.raw_age]


class LabelTable:
    """Immutable image-id -> label mapping, total over one image manifest."""

    def __init__(self, rows: Mapping[str, Label]):
        self._rows = dict(rows)

    def __len__(self) -> int:
        return len(self._rows)

    def __contains__(self, image_id: str) -> bool:
        return image_id in self._rows

    def __getitem__(self, image_id: str) -> Label:
        try:
            return self._rows[image_id]
        except KeyError:
            raise MissingLabel(image_id) from None

    def ids(self) -> Iterator[str]:
        return iter(self._rows)

    def to_dict(self) -> dict[str, Label]:
        return dict(self._rows)


def _parse_label(row: Mapping[str, str], line: int) -> tuple[str, Label]:
    image_id = (row.get("file") or "").strip()
    if not image_id:
        raise LabelError(f"line {line}: empty file column")
    gender = (row.get("gender") or "").strip()
    if gender not in GENDERS:
        raise UnknownGender(gender)
    race = (row.get("race") or "").strip()
    if race not in RACES:
        raise UnknownRace(race)
    raw_age = (row.get("age") or "").strip()
    raw_age = _AGE_BAND_ALIASES.get(raw_age, raw_age)
    if raw_age not in RAW_AGE_BANDS:
        raise UnknownAgeBand(raw_age)
    return image_id, Label(gender=gender, race=race, raw_age=raw_age)


def parse_labels_csv(path: str | Path) -> dict[str, Label]:
    """Parse a label CSV into an id -> Label dict, rejecting bad rows."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing:
            raise LabelError(f"{path}: header missing columns: {', '.join(missing)}")
        rows: dict[str, Label] = {}
        for line, row in enumerate(reader, start=2):
            image_id, label = _parse_label(row, line)
            if image_id in rows:
                raise DuplicateRow(image_id)
            rows[image_id] = label
    return rows


def check_totality(rows: "Mapping[str, Label] | LabelTable", manifest: Manifest) -> None:
    """Every manifest id must have exactly one label row."""
    for image_id in manifest.ids:
        if image_id not in rows:
            raise MissingLabel(image_id)


def load_labels(path: str | Path, manifest: Manifest) -> LabelTable:
    """Parse the CSV and verify totality over the given image manifest."""
    rows = parse_labels_csv(path)
    check_totality(rows, manifest)
    return LabelTable(rows)


def write_labels_csv(path: str | Path, rows: Mapping[str, Label]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(REQUIRED_COLUMNS)
        for image_id, label in rows.items():
            writer.writerow([image_id, label.raw_age, label.gender, label.race])
