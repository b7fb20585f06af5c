"""Domain types shared across the store, pipeline, and service layers.

Identifiers are store-assigned integers rendered as opaque strings at
this boundary; callers never parse them.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class DictionarySource:
    """Bibliographic record of one ingested dictionary."""

    title: str
    languages: list[str]
    citation: str
    year: int | None = None
    publisher: str | None = None
    source_id: str | None = None

    def payload(self) -> tuple:
        """Identity for idempotent registration (everything but the id)."""
        return (
            self.title,
            tuple(sorted(self.languages)),
            self.citation,
            self.year,
            self.publisher,
        )


@dataclass
class TermEntry:
    """One dictionary line: source term, Arabic equivalent, provenance."""

    source_term: str
    source_lang: str
    target_term: str
    source_id: str
    target_lang: str = "ar"
    definition: str | None = None
    entry_id: str | None = None
    term_group_id: str | None = None
    sense_id: str | None = None


@dataclass
class TermGroup:
    """All entries sharing one canonical source-term key in one language."""

    term_group_id: str
    canonical_key: str
    display_form: str
    lang: str
    member_count: int


@dataclass
class Sense:
    """One meaning of a source-language term in the reference inventory."""

    sense_id: str
    source_term_key: str
    ordinal: int
    gloss: str
    domain_tag: str | None = None


@dataclass
class StoreStats:
    entry_count: int = 0
    source_count: int = 0
    group_count: int = 0
    sense_count: int = 0
    mapped_entry_count: int = 0
    duplicate_count: int = 0


@dataclass
class RawRecord:
    """One parsed corpus line, before validation and dedup."""

    source_term: str
    target_term: str
    source_dictionary_key: str
    source_lang: str
    definition: str | None = None
    line_number: int = 1


@dataclass
class IngestReport:
    read_count: int = 0
    stored_count: int = 0
    duplicate_count: int = 0
    rejected_count: int = 0
    rejects: list[tuple[int, str]] = field(default_factory=list)


@dataclass
class Candidate:
    """One search hit: exact, whole-token containment, or fuzzy."""

    term_group_id: str
    display_form: str
    match_kind: str  # "exact" | "containment" | "fuzzy"
    edit_distance: int
    member_count: int


@dataclass
class MappingAssignment:
    entry_id: str
    sense_id: str
    score: float
    method: str  # "lexical" | "llm" | "manual"
    mapped_at: str


@dataclass
class EvalReport:
    total: int
    correct: int
    accuracy: float
    confusion: list[tuple[str, str, int]]
    unknown_entries: list[str] = field(default_factory=list)


@dataclass
class Citation:
    """One dictionary attestation backing an equivalent."""

    source_id: str
    citation: str
    original_spelling: str


@dataclass
class EquivalentGroup:
    """Morphologically-grouped Arabic equivalents with per-dictionary citations."""

    normalized_form: str
    display_form: str
    count: int
    citations: list[Citation]


@dataclass
class SenseBucket:
    """Entries of the matched group that share one sense, ranked equivalents inside."""

    sense_id: str | None  # None marks the trailing "unassigned" pseudo-bucket
    gloss: str
    instance_count: int
    equivalents: list[EquivalentGroup]
    ordinal: int | None = None
    domain_tag: str | None = None


@dataclass
class QueryResult:
    """Staged output of the five-step lookup."""

    query: str
    lang: str
    matched_group: TermGroup | None
    candidates: list[Candidate]
    senses: list[SenseBucket]
    recommendation: str | None
    approximate: bool
    timing_ms: int
