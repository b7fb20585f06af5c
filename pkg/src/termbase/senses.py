"""Sense inventory loading and entry-to-sense mapping.

The inventory is a JSON-lines file (one sense per line) with fields
``term``, ``ordinal``, ``gloss``, optional ``domain`` and ``lang``
(default "en").  Senses are keyed by the canonical key of the term and
ordered by their 1-based ordinal from the reference dictionary.

Mapping scores an entry's definition against every candidate sense of
its source term and assigns the argmax (ties -> lowest ordinal).  The
lexical backend is a deterministic Jaccard overlap over normalized
content tokens; the LLM backend (see ``termbase.llm``) trades
determinism for contextual accuracy.  Both present the same
``score_batch`` surface, so everything downstream is backend-agnostic.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from typing import IO, Iterable, Protocol

from .errors import NotFoundError, RetryableBackendError, ValidationError
from .models import EvalReport, MappingAssignment, Sense, TermEntry
from .normalize import canonical_key
from .store import Store


class MapperBackend(Protocol):
    name: str
    requires_definition: bool

    def score_batch(self, definition: str | None,
                    senses: list[Sense]) -> list[float]:
        """One score in [0, 1] per candidate sense, same order as input."""
        ...


class SenseInventory:
    """Ordered senses per source-term key, as loaded from the inventory file."""

    def __init__(self) -> None:
        self._by_key: dict[str, list[Sense]] = {}

    def add(self, term_key: str, ordinal: int, gloss: str,
            domain_tag: str | None = None) -> None:
        senses = self._by_key.setdefault(term_key, [])
        if any(s.ordinal == ordinal for s in senses):
            raise ValidationError(
                f"duplicate sense ordinal {ordinal} for term key {term_key!r}"
            )
        senses.append(Sense(sense_id="", source_term_key=term_key,
                            ordinal=ordinal, gloss=gloss, domain_tag=domain_tag))
        senses.sort(key=lambda s: s.ordinal)

    def senses_for(self, term_key: str) -> list[Sense]:
        return list(self._by_key.get(term_key, []))

    def term_keys(self) -> list[str]:
        return sorted(self._by_key)

    def __len__(self) -> int:
        return sum(len(v) for v in self._by_key.values())

    def persist(self, store: Store) -> int:
        """Write all senses into the store; idempotent. Returns sense count."""
        senses = [s for key in self.term_keys() for s in self._by_key[key]]
        store.put_senses(senses)
        return len(senses)


def load_sense_inventory(stream: IO[str] | Iterable[str]) -> SenseInventory:
    inventory = SenseInventory()
    for line_number, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(
                f"sense inventory line {line_number}: invalid JSON: {exc.msg}"
            ) from None
        try:
            term = obj["term"]
            ordinal = int(obj["ordinal"])
            gloss = obj["gloss"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(
                f"sense inventory line {line_number}: {exc}"
            ) from None
        if not gloss or not gloss.strip():
            raise ValidationError(
                f"sense inventory line {line_number}: empty gloss"
            )
        lang = obj.get("lang", "en")
        key = canonical_key(term, lang)
        inventory.add(key, ordinal, gloss.strip(), obj.get("domain"))
    return inventory


def load_stopwords(lang: str) -> frozenset[str]:
    try:
        text = resources.files("termbase.data").joinpath(
            f"stopwords_{lang}.txt").read_text(encoding="utf-8")
    except FileNotFoundError:
        return frozenset()
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


class LexicalBackend:
    """Jaccard similarity over normalized content tokens; fully deterministic."""

    name = "lexical"
    requires_definition = True

    def __init__(self, lang: str = "en"):
        self.lang = lang
        # Stopwords stored in canonical form so accent variants match.
        self._stopwords = frozenset(
            canonical_key(w, lang) for w in load_stopwords(lang)
        )

    def content_tokens(self, text: str) -> set[str]:
        return {t for t in canonical_key(text, self.lang).split()
                if t not in self._stopwords}

    def score_batch(self, definition: str | None,
                    senses: list[Sense]) -> list[float]:
        if definition is None:
            raise ValidationError("lexical backend requires a definition")
        tokens = self.content_tokens(definition)
        scores = []
        for sense in senses:
            gloss_tokens = self.content_tokens(sense.gloss)
            union = tokens | gloss_tokens
            scores.append(len(tokens & gloss_tokens) / len(union) if union else 0.0)
        return scores


def _utcnow_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def map_entry(entry: TermEntry, senses: list[Sense],
              backend: MapperBackend) -> MappingAssignment | None:
    """Assign the argmax-scored sense; None when the entry is unmappable."""
    if not senses:
        raise ValidationError(
            f"entry {entry.entry_id}: no candidate senses to map against"
        )
    has_definition = bool(entry.definition and entry.definition.strip())
    if not has_definition and backend.requires_definition:
        return None

    ordered = sorted(senses, key=lambda s: s.ordinal)
    scores = backend.score_batch(entry.definition, ordered)
    if len(scores) != len(ordered):
        raise ValidationError(
            f"backend {backend.name!r} returned {len(scores)} scores for "
            f"{len(ordered)} senses"
        )
    best_i = 0
    for i, score in enumerate(scores):
        if score > scores[best_i]:
            best_i = i
    chosen = ordered[best_i]
    return MappingAssignment(
        entry_id=entry.entry_id,
        sense_id=chosen.sense_id,
        score=min(1.0, max(0.0, scores[best_i])),
        method=backend.name,
        mapped_at=_utcnow_iso(),
    )


@dataclass
class MapAllReport:
    mapped_count: int = 0
    skipped_already_mapped: int = 0
    unmappable_no_senses: int = 0
    unmappable_no_definition: int = 0
    low_confidence_count: int = 0
    failures: list[tuple[str, str]] = field(default_factory=list)


def map_all(store: Store, inventory: SenseInventory | None,
            backend: MapperBackend, batch_size: int = 100) -> MapAllReport:
    """Map every mappable unmapped entry; resumable and failure-tolerant."""
    if batch_size < 1:
        raise ValidationError("batch_size must be >= 1")
    if inventory is not None:
        inventory.persist(store)

    report = MapAllReport()
    already = store.mapped_entry_ids()
    pending = []
    for entry in store.all_entries():
        if entry.entry_id in already:
            report.skipped_already_mapped += 1
        else:
            pending.append(entry)

    sense_cache: dict[str, list[Sense]] = {}
    for start in range(0, len(pending), batch_size):
        for entry in pending[start:start + batch_size]:
            key = canonical_key(entry.source_term, entry.source_lang)
            if key not in sense_cache:
                sense_cache[key] = store.senses_for_key(key)
            senses = sense_cache[key]
            if not senses:
                report.unmappable_no_senses += 1
                continue
            try:
                assignment = map_entry(entry, senses, backend)
            except RetryableBackendError as exc:
                report.failures.append((entry.entry_id, exc.message))
                continue
            if assignment is None:
                report.unmappable_no_definition += 1
                continue
            store.set_mapping(entry.entry_id, assignment.sense_id,
                              assignment.score, assignment.method,
                              assignment.mapped_at)
            report.mapped_count += 1
            if assignment.score == 0.0:
                report.low_confidence_count += 1
    return report


def evaluate_mapping(gold_stream: IO[str] | Iterable[str],
                     store: Store) -> EvalReport:
    """Accuracy of stored assignments against a gold (entry_id, sense_id) file.

    Gold rows whose entry is missing or unmapped are reported and excluded
    from the accuracy denominator.
    """
    total = 0
    correct = 0
    unknown: list[str] = []
    confusion: Counter[tuple[str, str]] = Counter()

    for line_number, line in enumerate(gold_stream, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            gold_entry = str(obj["entry_id"])
            gold_sense = str(obj["sense_id"])
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ValidationError(f"gold line {line_number}: {exc}") from None
        try:
            entry = store.entry_by_id(gold_entry)
        except NotFoundError:
            unknown.append(gold_entry)
            continue
        if entry.sense_id is None:
            unknown.append(gold_entry)
            continue
        total += 1
        confusion[(gold_sense, entry.sense_id)] += 1
        if entry.sense_id == gold_sense:
            correct += 1

    pairs = sorted(confusion.items(), key=lambda kv: (-kv[1], kv[0]))
    return EvalReport(
        total=total,
        correct=correct,
        accuracy=correct / total if total else 0.0,
        confusion=[(g, p, n) for (g, p), n in pairs],
        unknown_entries=unknown,
    )
