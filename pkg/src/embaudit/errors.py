"""Exception hierarchy for the audit engine.

Everything raised on bad data derives from :class:`AuditError`, which the CLI
maps to exit code 2. :class:`UsageError` (bad invocation, exit code 1) is kept
outside that hierarchy on purpose.
"""

from __future__ import annotations


class AuditError(Exception):
    """Base class for all data and contract violations."""


# --- embedding file / manifest -------------------------------------------------

class CorpusFormatError(AuditError):
    """Malformed embedding file."""


class BadMagic(CorpusFormatError):
    pass


class VersionUnsupported(CorpusFormatError):
    pass


class TruncatedPayload(CorpusFormatError):
    pass


class TrailingBytes(CorpusFormatError):
    pass


class ChecksumMismatch(CorpusFormatError):
    pass


class DimensionZero(CorpusFormatError):
    pass


class ZeroNormVector(CorpusFormatError):
    def __init__(self, row: int, message: str | None = None):
        self.row = row
        super().__init__(message or f"vector at row {row} has near-zero norm")


class ManifestError(AuditError):
    """Missing or inconsistent sidecar manifest."""


class ManifestMissing(ManifestError):
    pass


class ManifestInvalid(ManifestError):
    pass


# --- labels ---------------------------------------------------------------------

class LabelError(AuditError):
    pass


class MissingLabel(LabelError):
    def __init__(self, image_id: str):
        self.image_id = image_id
        super().__init__(f"no label row for image id {image_id!r}")


class DuplicateRow(LabelError):
    def __init__(self, image_id: str):
        self.image_id = image_id
        super().__init__(f"duplicate label row for image id {image_id!r}")


class UnknownGender(LabelError):
    def __init__(self, value: str):
        self.value = value
        super().__init__(f"unknown gender value {value!r}")


class UnknownRace(LabelError):
    def __init__(self, value: str):
        self.value = value
        super().__init__(f"unknown race value {value!r}")


class UnknownAgeBand(LabelError):
    def __init__(self, value: str):
        self.value = value
        super().__init__(f"unknown age band {value!r}")


# --- taxonomy -------------------------------------------------------------------

class TaxonomyError(AuditError):
    pass


class UnknownRole(TaxonomyError):
    def __init__(self, role: str):
        self.role = role
        super().__init__(f"role {role!r} not present in taxonomy")


# --- synthetic corpus -----------------------------------------------------------

class SyntheticSpecError(AuditError):
    pass


class InvalidShares(SyntheticSpecError):
    pass


class SeedRequired(SyntheticSpecError):
    pass


# --- retrieval ------------------------------------------------------------------

class RetrievalError(AuditError):
    pass


class DimMismatch(RetrievalError):
    pass


class KZero(RetrievalError):
    pass


class KExceedsCorpus(RetrievalError):
    pass


# --- metrics --------------------------------------------------------------------

class MetricError(AuditError):
    pass


class CategoryMismatch(MetricError):
    pass


class UnsupportedZeroDenominator(MetricError):
    pass


class CZero(MetricError):
    pass


# --- analysis -------------------------------------------------------------------

class AnalysisError(AuditError):
    pass


class ThresholdOutOfRange(AnalysisError):
    pass


class EmptyModelSet(AnalysisError):
    pass


class FewerThanTwoModels(AnalysisError):
    pass


# --- configuration / CLI --------------------------------------------------------

class ConfigError(AuditError):
    pass


class UsageError(Exception):
    """Bad command-line invocation; maps to exit code 1."""
