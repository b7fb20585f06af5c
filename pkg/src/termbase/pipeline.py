"""Five-step query orchestration: from a raw term to a recommended equivalent.

1. look the term up in the search index (exact / containment / fuzzy);
2. select the exact-match group if present, else the top candidate
   (the result is then flagged approximate);
3. bucket the group's entries by assigned sense and rank buckets by
   instance count;
4. inside each bucket, group Arabic equivalents by canonical key,
   keeping per-dictionary citations;
5. recommend the display form of the top equivalent of the top bucket.

Tie-breaks, all deterministic: sense buckets with equal counts order by
ordinal; entries without a sense form a trailing "unassigned"
pseudo-bucket (never dropped: counts must conserve); equivalents with
equal counts order by normalized form; the display form of an
equivalent is its most frequent original spelling, ties resolved to the
lexicographically smallest.
"""

from __future__ import annotations

import time
from collections import Counter

from .models import (
    Citation,
    DictionarySource,
    EquivalentGroup,
    QueryResult,
    SenseBucket,
    TermEntry,
)
from .normalize import canonical_key
from .search import SearchIndex
from .store import Store

UNASSIGNED_LABEL = "unassigned"


def query(store: Store, index: SearchIndex, term: str, lang: str,
          limit: int = 50, include_candidates: bool = True) -> QueryResult:
    started = time.perf_counter()
    candidates = index.lookup(term, lang, limit=limit)

    if not candidates:
        return QueryResult(
            query=term, lang=lang, matched_group=None, candidates=[],
            senses=[], recommendation=None, approximate=False,
            timing_ms=_elapsed_ms(started),
        )

    top = candidates[0]
    approximate = top.match_kind != "exact"
    group = store.group_by_id(top.term_group_id)
    entries = store.entries_by_group(group.term_group_id)
    senses = _bucket_by_sense(store, entries)
    recommendation = None
    if senses and senses[0].equivalents:
        recommendation = senses[0].equivalents[0].display_form

    return QueryResult(
        query=term,
        lang=lang,
        matched_group=group,
        candidates=candidates if include_candidates else [],
        senses=senses,
        recommendation=recommendation,
        approximate=approximate,
        timing_ms=_elapsed_ms(started),
    )


def _elapsed_ms(started: float) -> int:
    return int((time.perf_counter() - started) * 1000)


def _bucket_by_sense(store: Store, entries: list[TermEntry]) -> list[SenseBucket]:
    by_sense: dict[str | None, list[TermEntry]] = {}
    for entry in entries:
        by_sense.setdefault(entry.sense_id, []).append(entry)

    source_cache: dict[str, DictionarySource] = {}
    buckets = []
    for sense_id, members in by_sense.items():
        if sense_id is None:
            continue
        sense = store.sense_by_id(sense_id)
        buckets.append(SenseBucket(
            sense_id=sense_id,
            gloss=sense.gloss,
            ordinal=sense.ordinal,
            domain_tag=sense.domain_tag,
            instance_count=len(members),
            equivalents=_group_equivalents(store, members, source_cache),
        ))
    buckets.sort(key=lambda b: (-b.instance_count, b.ordinal))

    unmapped = by_sense.get(None)
    if unmapped:
        buckets.append(SenseBucket(
            sense_id=None,
            gloss=UNASSIGNED_LABEL,
            ordinal=None,
            domain_tag=None,
            instance_count=len(unmapped),
            equivalents=_group_equivalents(store, unmapped, source_cache),
        ))
    return buckets


def _group_equivalents(store: Store, entries: list[TermEntry],
                       source_cache: dict[str, DictionarySource],
                       ) -> list[EquivalentGroup]:
    by_key: dict[str, list[TermEntry]] = {}
    for entry in sorted(entries, key=lambda e: int(e.entry_id)):
        key = canonical_key(entry.target_term, entry.target_lang)
        by_key.setdefault(key, []).append(entry)

    groups = []
    for normalized_form, members in by_key.items():
        spellings = Counter(e.target_term for e in members)
        display_form = min(spellings.items(), key=lambda kv: (-kv[1], kv[0]))[0]
        citations = []
        for entry in members:
            if entry.source_id not in source_cache:
                source_cache[entry.source_id] = store.get_source(entry.source_id)
            citations.append(Citation(
                source_id=entry.source_id,
                citation=source_cache[entry.source_id].citation,
                original_spelling=entry.target_term,
            ))
        groups.append(EquivalentGroup(
            normalized_form=normalized_form,
            display_form=display_form,
            count=len(citations),
            citations=citations,
        ))
    groups.sort(key=lambda g: (-g.count, g.normalized_form))
    return groups


def term_detail(store: Store, term_group_id: str) -> dict:
    """Full per-entry listing of one group: definitions, senses, citations."""
    group = store.group_by_id(term_group_id)
    rows = []
    source_cache: dict[str, DictionarySource] = {}
    sense_cache: dict[str, tuple[str, str | None]] = {}
    for entry in store.entries_by_group(term_group_id):
        if entry.source_id not in source_cache:
            source_cache[entry.source_id] = store.get_source(entry.source_id)
        source = source_cache[entry.source_id]
        if entry.sense_id is None:
            sense_obj = None
        else:
            if entry.sense_id not in sense_cache:
                sense = store.sense_by_id(entry.sense_id)
                sense_cache[entry.sense_id] = (sense.gloss, sense.domain_tag)
            gloss, domain_tag = sense_cache[entry.sense_id]
            sense_obj = {"sense_id": entry.sense_id, "gloss": gloss,
                         "domain_tag": domain_tag}
        rows.append({
            "entry_id": entry.entry_id,
            "source_term": entry.source_term,
            "target_term": entry.target_term,
            "definition": entry.definition,
            "sense": sense_obj if sense_obj is not None else UNASSIGNED_LABEL,
            "source": {
                "source_id": source.source_id,
                "title": source.title,
                "citation": source.citation,
            },
        })
    return {
        "term_group_id": group.term_group_id,
        "canonical_key": group.canonical_key,
        "display_form": group.display_form,
        "lang": group.lang,
        "member_count": group.member_count,
        "entries": rows,
    }
