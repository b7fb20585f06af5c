"""Corpus parsing, validation, deduplication, and store loading.

Two input formats are supported:

* ``jsonl``: one JSON object per line with fields ``source_term``,
  ``target_term``, ``definition`` (optional), ``dictionary``, ``lang``.
  Unknown fields are ignored; blank lines are skipped.
* ``tsv``: five tab-separated columns in the same order, no header;
  an empty third column means "no definition".

A record is a duplicate iff an earlier record (in this run or already in
the store) has the same (canonical source key, canonical target key,
dictionary key).  The same pair from two different dictionaries is two
independent attestations and both are kept: per-dictionary counts are
the ranking signal downstream.

Malformed or invalid lines become rejects with reasons; they never abort
the run.  Report arithmetic always holds:
read = stored + duplicates + rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator

from .errors import ConfigError, ValidationError
from .models import DictionarySource, IngestReport, RawRecord, TermEntry
from .normalize import BUILTIN_PROFILES, canonical_key
from .store import Store

CORPUS_FIELDS = ("source_term", "target_term", "definition", "dictionary", "lang")


@dataclass
class ParseReject:
    line_number: int
    reason: str


def parse_corpus(stream: IO[str] | Iterable[str],
                 format: str = "jsonl") -> Iterator[RawRecord | ParseReject]:
    """Yield one RawRecord per logical line; malformed lines become rejects."""
    if format == "jsonl":
        parse_line = _parse_jsonl_line
    elif format == "tsv":
        parse_line = _parse_tsv_line
    else:
        raise ConfigError(f"unknown corpus format {format!r} (jsonl or tsv)")

    for line_number, line in enumerate(stream, start=1):
        stripped = line.rstrip("\n").rstrip("\r")
        if not stripped.strip():
            continue
        yield parse_line(stripped, line_number)


def _parse_jsonl_line(line: str, line_number: int) -> RawRecord | ParseReject:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        return ParseReject(line_number, f"invalid JSON: {exc.msg}")
    if not isinstance(obj, dict):
        return ParseReject(line_number, "line is not a JSON object")
    missing = [f for f in ("source_term", "target_term", "dictionary", "lang")
               if not isinstance(obj.get(f), str) or not obj[f].strip()]
    if missing:
        return ParseReject(line_number, f"missing or empty fields: {missing}")
    definition = obj.get("definition")
    if definition is not None and not isinstance(definition, str):
        return ParseReject(line_number, "definition must be a string")
    return RawRecord(
        source_term=obj["source_term"],
        target_term=obj["target_term"],
        definition=definition if definition and definition.strip() else None,
        source_dictionary_key=obj["dictionary"],
        source_lang=obj["lang"],
        line_number=line_number,
    )


def _parse_tsv_line(line: str, line_number: int) -> RawRecord | ParseReject:
    cols = line.split("\t")
    if len(cols) != 5:
        return ParseReject(line_number, f"expected 5 columns, got {len(cols)}")
    source_term, target_term, definition, dictionary, lang = cols
    if not source_term.strip() or not target_term.strip():
        return ParseReject(line_number, "empty source_term or target_term")
    if not dictionary.strip() or not lang.strip():
        return ParseReject(line_number, "empty dictionary or lang")
    return RawRecord(
        source_term=source_term,
        target_term=target_term,
        definition=definition if definition.strip() else None,
        source_dictionary_key=dictionary.strip(),
        source_lang=lang.strip(),
        line_number=line_number,
    )


def _attestation_key(record: RawRecord) -> tuple[str, str, str]:
    return (
        canonical_key(record.source_term, record.source_lang),
        canonical_key(record.target_term, "ar"),
        record.source_dictionary_key,
    )


def deduplicate(records: Iterable[RawRecord],
                seen: set[tuple[str, str, str]] | None = None,
                ) -> tuple[list[RawRecord], int]:
    """Drop later repeats of (source key, target key, dictionary); first wins."""
    seen = set() if seen is None else seen
    unique: list[RawRecord] = []
    duplicates = 0
    for record in records:
        key = _attestation_key(record)
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)
        unique.append(record)
    return unique, duplicates


def load_manifest(path: str | Path) -> list[tuple[str, DictionarySource]]:
    """Sidecar manifest: JSON array of dictionary records with a ``key`` field."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"manifest {path}: invalid JSON: {exc}") from None
    if not isinstance(data, list):
        raise ValidationError(f"manifest {path}: expected a JSON array")
    out = []
    for i, item in enumerate(data):
        try:
            key = item["key"]
            source = DictionarySource(
                title=item["title"],
                languages=list(item["languages"]),
                citation=item["citation"],
                year=item.get("year"),
                publisher=item.get("publisher"),
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"manifest {path}: record {i}: {exc}") from None
        out.append((key, source))
    return out


def register_sources(store: Store,
                     manifest: list[tuple[str, DictionarySource]]) -> dict[str, str]:
    """Register manifest sources; returns dictionary key -> source_id."""
    mapping = {}
    for key, source in manifest:
        mapping[key] = store.put_source(source, key=key)
    return mapping


def ingest(store: Store, stream: IO[str] | Iterable[str],
           format: str = "jsonl",
           manifest: list[tuple[str, DictionarySource]] | None = None,
           ) -> IngestReport:
    """Parse, validate, deduplicate, and load a corpus in one atomic batch."""
    report = IngestReport()
    if manifest:
        register_sources(store, manifest)

    valid: list[RawRecord] = []
    for item in parse_corpus(stream, format=format):
        report.read_count += 1
        if isinstance(item, ParseReject):
            report.rejects.append((item.line_number, item.reason))
            continue
        reason = _validate(store, item)
        if reason is not None:
            report.rejects.append((item.line_number, reason))
            continue
        valid.append(item)
    report.rejected_count = len(report.rejects)

    seen = store.existing_attestations()
    unique, report.duplicate_count = deduplicate(valid, seen=seen)

    entries = [
        TermEntry(
            source_term=r.source_term.strip(),
            source_lang=r.source_lang,
            target_term=r.target_term.strip(),
            target_lang="ar",
            definition=r.definition,
            source_id=store.source_id_for_key(r.source_dictionary_key),
        )
        for r in unique
    ]
    report.stored_count = store.put_entries(entries)
    if report.duplicate_count:
        store.add_duplicates(report.duplicate_count)
    return report


def _validate(store: Store, record: RawRecord) -> str | None:
    if record.source_lang not in BUILTIN_PROFILES:
        return f"unsupported source language {record.source_lang!r}"
    if store.source_id_for_key(record.source_dictionary_key) is None:
        return (f"unknown dictionary key {record.source_dictionary_key!r} "
                f"(register it via the manifest)")
    if not canonical_key(record.source_term, record.source_lang):
        return "source_term is empty after cleanup"
    if not canonical_key(record.target_term, "ar"):
        return "target_term is empty after cleanup"
    return None
