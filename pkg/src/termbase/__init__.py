"""Terminology standardization engine.

Ingests multilingual dictionary corpora and answers translator queries
with ranked, sense-grouped Arabic equivalents plus a single recommended
standard form.
"""

from .errors import TermbaseError
from .ingest import deduplicate, ingest, parse_corpus
from .models import (
    Candidate,
    DictionarySource,
    EquivalentGroup,
    EvalReport,
    IngestReport,
    MappingAssignment,
    QueryResult,
    RawRecord,
    Sense,
    SenseBucket,
    StoreStats,
    TermEntry,
    TermGroup,
)
from .normalize import NormalizationProfile, canonical_key, normalize, profile_for
from .pipeline import query, term_detail
from .search import SearchIndex, levenshtein
from .senses import (
    LexicalBackend,
    SenseInventory,
    evaluate_mapping,
    load_sense_inventory,
    map_all,
    map_entry,
)
from .store import Store

__version__ = "0.1.0"

__all__ = [
    "Candidate",
    "DictionarySource",
    "EquivalentGroup",
    "EvalReport",
    "IngestReport",
    "LexicalBackend",
    "MappingAssignment",
    "NormalizationProfile",
    "QueryResult",
    "RawRecord",
    "SearchIndex",
    "Sense",
    "SenseBucket",
    "SenseInventory",
    "Store",
    "StoreStats",
    "TermEntry",
    "TermGroup",
    "TermbaseError",
    "canonical_key",
    "deduplicate",
    "evaluate_mapping",
    "ingest",
    "levenshtein",
    "load_sense_inventory",
    "map_all",
    "map_entry",
    "normalize",
    "parse_corpus",
    "profile_for",
    "query",
    "term_detail",
]
