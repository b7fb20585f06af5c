"""Single-file persistent store for sources, entries, groups, senses, mappings.

Backed by sqlite: one file, relational schema, transactional batches.
The schema version lives in the file header (``PRAGMA user_version``);
opening a file written by a newer schema is refused.

Concurrency: single writer, many readers.  Writers take an exclusive
flock on ``<path>.lock``; a serving process pins the store with a shared
lock so ingestion/mapping commands refuse to run against it.  Readers
opened with ``readonly=True`` use sqlite's snapshot isolation and never
observe a partially-applied batch.
"""

from __future__ import annotations

import fcntl
import json
import sqlite3
import threading
import unicodedata
from hashlib import sha256
from pathlib import Path

from .errors import (
    ConflictError,
    NotFoundError,
    ReferentialError,
    SchemaVersionError,
    StoreLockedError,
    ValidationError,
)
from .models import DictionarySource, Sense, StoreStats, TermEntry, TermGroup
from .normalize import canonical_key

SCHEMA_VERSION = 1

_SCHEMA = """
CREATE TABLE IF NOT EXISTS sources (
    source_id   INTEGER PRIMARY KEY AUTOINCREMENT,
    source_key  TEXT UNIQUE,
    title       TEXT NOT NULL,
    languages   TEXT NOT NULL,
    year        INTEGER,
    publisher   TEXT,
    citation    TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS term_groups (
    term_group_id INTEGER PRIMARY KEY AUTOINCREMENT,
    canonical_key TEXT NOT NULL,
    display_form  TEXT NOT NULL,
    lang          TEXT NOT NULL,
    member_count  INTEGER NOT NULL DEFAULT 0,
    UNIQUE (canonical_key, lang)
);
CREATE TABLE IF NOT EXISTS entries (
    entry_id        INTEGER PRIMARY KEY AUTOINCREMENT,
    source_term     TEXT NOT NULL,
    source_lang     TEXT NOT NULL,
    target_term     TEXT NOT NULL,
    target_lang     TEXT NOT NULL DEFAULT 'ar',
    definition      TEXT,
    source_id       INTEGER NOT NULL REFERENCES sources(source_id),
    term_group_id   INTEGER NOT NULL REFERENCES term_groups(term_group_id),
    sense_id        INTEGER REFERENCES senses(sense_id),
    source_key_norm TEXT NOT NULL,
    target_key_norm TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS idx_entries_group ON entries(term_group_id);
CREATE INDEX IF NOT EXISTS idx_entries_attestation
    ON entries(source_key_norm, target_key_norm, source_id);
CREATE TABLE IF NOT EXISTS senses (
    sense_id        INTEGER PRIMARY KEY AUTOINCREMENT,
    source_term_key TEXT NOT NULL,
    ordinal         INTEGER NOT NULL,
    gloss           TEXT NOT NULL,
    domain_tag      TEXT,
    UNIQUE (source_term_key, ordinal)
);
CREATE TABLE IF NOT EXISTS mappings (
    entry_id  INTEGER PRIMARY KEY REFERENCES entries(entry_id),
    sense_id  INTEGER NOT NULL REFERENCES senses(sense_id),
    score     REAL NOT NULL,
    method    TEXT NOT NULL,
    mapped_at TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS meta (key TEXT PRIMARY KEY, value TEXT NOT NULL);
"""


def _nfc(text: str | None) -> str | None:
    if text is None:
        return None
    return unicodedata.normalize("NFC", text)


class Store:
    """System of record for the term base. Open read-write or read-only."""

    def __init__(self, path: str | Path, readonly: bool = False,
                 shared_lock: bool = False):
        self.path = Path(path)
        self.readonly = readonly
        self._lock = threading.RLock()
        self._flock_file = None

        if readonly and not self.path.exists():
            raise NotFoundError(f"store file not found: {self.path}")

        if not readonly:
            self._acquire_flock(exclusive=True)
        elif shared_lock:
            self._acquire_flock(exclusive=False)

        if readonly:
            uri = f"file:{self.path}?mode=ro"
            self._conn = sqlite3.connect(uri, uri=True, check_same_thread=False)
        else:
            self._conn = sqlite3.connect(self.path, check_same_thread=False)
        self._conn.row_factory = sqlite3.Row

        version = self._conn.execute("PRAGMA user_version").fetchone()[0]
        if version > SCHEMA_VERSION:
            self._conn.close()
            self._release_flock()
            raise SchemaVersionError(
                f"store schema version {version} is newer than supported "
                f"version {SCHEMA_VERSION}; refusing to open"
            )
        if not readonly:
            if version == 0:
                self._conn.executescript(_SCHEMA)
                self._conn.execute(f"PRAGMA user_version = {SCHEMA_VERSION}")
                self._conn.commit()

    def _acquire_flock(self, exclusive: bool) -> None:
        lock_path = self.path.with_name(self.path.name + ".lock")
        self._flock_file = open(lock_path, "a")
        flags = (fcntl.LOCK_EX if exclusive else fcntl.LOCK_SH) | fcntl.LOCK_NB
        try:
            fcntl.flock(self._flock_file, flags)
        except OSError:
            self._flock_file.close()
            self._flock_file = None
            kind = "write" if exclusive else "shared"
            raise StoreLockedError(
                f"cannot take {kind} lock on {self.path}: held by another "
                f"process (a serve or ingest job is using this store)"
            ) from None

    def _release_flock(self) -> None:
        if self._flock_file is not None:
            fcntl.flock(self._flock_file, fcntl.LOCK_UN)
            self._flock_file.close()
            self._flock_file = None

    def close(self) -> None:
        with self._lock:
            self._conn.close()
            self._release_flock()

    def __enter__(self) -> "Store":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- sources ---------------------------------------------------------

    def put_source(self, source: DictionarySource, key: str | None = None) -> str:
        """Register a dictionary; idempotent on an identical payload.

        ``key`` is the external dictionary key corpus lines refer to.
        Re-putting an existing source_id (or key) with a different payload
        is a conflict.
        """
        if not source.citation or not source.citation.strip():
            raise ValidationError("source citation must be non-empty")
        if not source.languages:
            raise ValidationError("source languages must be non-empty")

        title = _nfc(source.title)
        citation = _nfc(source.citation)
        publisher = _nfc(source.publisher)
        languages = json.dumps(sorted(source.languages))

        with self._lock:
            if source.source_id is not None:
                row = self._conn.execute(
                    "SELECT * FROM sources WHERE source_id = ?",
                    (self._int_id(source.source_id),),
                ).fetchone()
                if row is None:
                    raise NotFoundError(f"unknown source_id {source.source_id}")
                if self._source_payload(row) != self._payload_tuple(source):
                    raise ConflictError(
                        f"source_id {source.source_id} already stored with a "
                        f"different payload"
                    )
                return str(row["source_id"])

            for row in self._conn.execute("SELECT * FROM sources"):
                if self._source_payload(row) == self._payload_tuple(source):
                    if key is not None and row["source_key"] is None:
                        # Same dictionary, registered keyless earlier:
                        # attach the key so corpus lines can resolve it.
                        self._conn.execute(
                            "UPDATE sources SET source_key = ? "
                            "WHERE source_id = ?",
                            (key, row["source_id"]),
                        )
                        self._conn.commit()
                    return str(row["source_id"])

            if key is not None:
                row = self._conn.execute(
                    "SELECT * FROM sources WHERE source_key = ?", (key,)
                ).fetchone()
                if row is not None:
                    raise ConflictError(
                        f"dictionary key {key!r} already registered with a "
                        f"different payload"
                    )

            cur = self._conn.execute(
                "INSERT INTO sources (source_key, title, languages, year, "
                "publisher, citation) VALUES (?, ?, ?, ?, ?, ?)",
                (key, title, languages, source.year, publisher, citation),
            )
            self._conn.commit()
            return str(cur.lastrowid)

    @staticmethod
    def _payload_tuple(source: DictionarySource) -> tuple:
        return (
            _nfc(source.title),
            tuple(sorted(source.languages)),
            _nfc(source.citation),
            source.year,
            _nfc(source.publisher),
        )

    @staticmethod
    def _source_payload(row: sqlite3.Row) -> tuple:
        return (
            row["title"],
            tuple(json.loads(row["languages"])),
            row["citation"],
            row["year"],
            row["publisher"],
        )

    def get_source(self, source_id: str) -> DictionarySource:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM sources WHERE source_id = ?",
                (self._int_id(source_id),),
            ).fetchone()
        if row is None:
            raise NotFoundError(f"unknown source_id {source_id}")
        return self._row_to_source(row)

    @staticmethod
    def _row_to_source(row: sqlite3.Row) -> DictionarySource:
        return DictionarySource(
            source_id=str(row["source_id"]),
            title=row["title"],
            languages=json.loads(row["languages"]),
            year=row["year"],
            publisher=row["publisher"],
            citation=row["citation"],
        )

    def source_id_for_key(self, key: str) -> str | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT source_id FROM sources WHERE source_key = ?", (key,)
            ).fetchone()
        return None if row is None else str(row["source_id"])

    def list_sources(self) -> list[DictionarySource]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT * FROM sources ORDER BY source_id"
            ).fetchall()
        return [self._row_to_source(r) for r in rows]

    def source_key_of(self, source_id: str) -> str | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT source_key FROM sources WHERE source_id = ?",
                (self._int_id(source_id),),
            ).fetchone()
        return None if row is None else row["source_key"]

    # -- entries and groups ----------------------------------------------

    def put_entries(self, batch: list[TermEntry]) -> int:
        """Store a batch atomically; assigns term groups from canonical keys."""
        if not batch:
            return 0

        prepared = []
        with self._lock:
            for i, entry in enumerate(batch):
                src = _nfc(entry.source_term).strip()
                tgt = _nfc(entry.target_term).strip()
                if not src or not tgt:
                    raise ValidationError(
                        f"entry {i}: source_term and target_term must be "
                        f"non-empty after trimming"
                    )
                sid = self._int_id(entry.source_id)
                row = self._conn.execute(
                    "SELECT source_id FROM sources WHERE source_id = ?", (sid,)
                ).fetchone()
                if row is None:
                    raise ReferentialError(
                        f"entry {i} ({src!r}): source_id {entry.source_id} "
                        f"does not resolve"
                    )
                src_key = canonical_key(src, entry.source_lang)
                tgt_key = canonical_key(tgt, entry.target_lang)
                if not src_key or not tgt_key:
                    raise ValidationError(
                        f"entry {i} ({src!r}): term is empty after cleanup"
                    )
                prepared.append((entry, src, tgt, sid, src_key, tgt_key))

            try:
                self._conn.execute("BEGIN")
                touched_groups = set()
                for entry, src, tgt, sid, src_key, tgt_key in prepared:
                    group_id = self._get_or_create_group(src_key, entry.source_lang, src)
                    touched_groups.add(group_id)
                    self._conn.execute(
                        "INSERT INTO entries (source_term, source_lang, "
                        "target_term, target_lang, definition, source_id, "
                        "term_group_id, source_key_norm, target_key_norm) "
                        "VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)",
                        (src, entry.source_lang, tgt, entry.target_lang,
                         _nfc(entry.definition), sid, group_id, src_key, tgt_key),
                    )
                for group_id in touched_groups:
                    self._refresh_group(group_id)
                self._conn.commit()
            except Exception:
                self._conn.rollback()
                raise
        return len(prepared)

    def _get_or_create_group(self, key: str, lang: str, display: str) -> int:
        row = self._conn.execute(
            "SELECT term_group_id FROM term_groups WHERE canonical_key = ? "
            "AND lang = ?",
            (key, lang),
        ).fetchone()
        if row is not None:
            return row["term_group_id"]
        cur = self._conn.execute(
            "INSERT INTO term_groups (canonical_key, display_form, lang, "
            "member_count) VALUES (?, ?, ?, 0)",
            (key, display, lang),
        )
        return cur.lastrowid

    def _refresh_group(self, group_id: int) -> None:
        # display_form = modal original spelling, ties broken lexicographically.
        row = self._conn.execute(
            "SELECT source_term, COUNT(*) AS n FROM entries "
            "WHERE term_group_id = ? GROUP BY source_term "
            "ORDER BY n DESC, source_term ASC LIMIT 1",
            (group_id,),
        ).fetchone()
        count = self._conn.execute(
            "SELECT COUNT(*) AS n FROM entries WHERE term_group_id = ?",
            (group_id,),
        ).fetchone()["n"]
        if row is not None:
            self._conn.execute(
                "UPDATE term_groups SET display_form = ?, member_count = ? "
                "WHERE term_group_id = ?",
                (row["source_term"], count, group_id),
            )

    def entries_by_group(self, term_group_id: str) -> list[TermEntry]:
        gid = self._int_id(term_group_id)
        with self._lock:
            group = self._conn.execute(
                "SELECT term_group_id FROM term_groups WHERE term_group_id = ?",
                (gid,),
            ).fetchone()
            if group is None:
                raise NotFoundError(f"unknown term_group_id {term_group_id}")
            rows = self._conn.execute(
                "SELECT * FROM entries WHERE term_group_id = ? ORDER BY entry_id",
                (gid,),
            ).fetchall()
        return [self._row_to_entry(r) for r in rows]

    @staticmethod
    def _row_to_entry(row: sqlite3.Row) -> TermEntry:
        return TermEntry(
            entry_id=str(row["entry_id"]),
            source_term=row["source_term"],
            source_lang=row["source_lang"],
            target_term=row["target_term"],
            target_lang=row["target_lang"],
            definition=row["definition"],
            source_id=str(row["source_id"]),
            term_group_id=str(row["term_group_id"]),
            sense_id=None if row["sense_id"] is None else str(row["sense_id"]),
        )

    def group_by_id(self, term_group_id: str) -> TermGroup:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM term_groups WHERE term_group_id = ?",
                (self._int_id(term_group_id),),
            ).fetchone()
        if row is None:
            raise NotFoundError(f"unknown term_group_id {term_group_id}")
        return self._row_to_group(row)

    def group_by_key(self, key: str, lang: str) -> TermGroup | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM term_groups WHERE canonical_key = ? AND lang = ?",
                (key, lang),
            ).fetchone()
        return None if row is None else self._row_to_group(row)

    def all_groups(self, lang: str | None = None) -> list[TermGroup]:
        with self._lock:
            if lang is None:
                rows = self._conn.execute(
                    "SELECT * FROM term_groups ORDER BY term_group_id"
                ).fetchall()
            else:
                rows = self._conn.execute(
                    "SELECT * FROM term_groups WHERE lang = ? "
                    "ORDER BY term_group_id",
                    (lang,),
                ).fetchall()
        return [self._row_to_group(r) for r in rows]

    @staticmethod
    def _row_to_group(row: sqlite3.Row) -> TermGroup:
        return TermGroup(
            term_group_id=str(row["term_group_id"]),
            canonical_key=row["canonical_key"],
            display_form=row["display_form"],
            lang=row["lang"],
            member_count=row["member_count"],
        )

    def all_entries(self) -> list[TermEntry]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT * FROM entries ORDER BY entry_id"
            ).fetchall()
        return [self._row_to_entry(r) for r in rows]

    def existing_attestations(self) -> set[tuple[str, str, str]]:
        """(source key, target key, dictionary key) triples already stored."""
        with self._lock:
            rows = self._conn.execute(
                "SELECT e.source_key_norm, e.target_key_norm, "
                "COALESCE(s.source_key, CAST(e.source_id AS TEXT)) AS dict_key "
                "FROM entries e JOIN sources s ON s.source_id = e.source_id"
            ).fetchall()
        return {(r[0], r[1], r[2]) for r in rows}

    # -- senses and mappings ----------------------------------------------

    def put_senses(self, senses: list[Sense]) -> list[str]:
        """Persist inventory senses; idempotent on (term key, ordinal, gloss)."""
        ids = []
        with self._lock:
            try:
                self._conn.execute("BEGIN")
                for s in senses:
                    if not s.gloss or not s.gloss.strip():
                        raise ValidationError(
                            f"sense ({s.source_term_key!r}, {s.ordinal}): "
                            f"gloss must be non-empty"
                        )
                    row = self._conn.execute(
                        "SELECT sense_id, gloss, domain_tag FROM senses "
                        "WHERE source_term_key = ? AND ordinal = ?",
                        (s.source_term_key, s.ordinal),
                    ).fetchone()
                    if row is not None:
                        if (row["gloss"], row["domain_tag"]) != (
                            _nfc(s.gloss), _nfc(s.domain_tag)
                        ):
                            raise ConflictError(
                                f"sense ({s.source_term_key!r}, {s.ordinal}) "
                                f"already stored with a different gloss"
                            )
                        ids.append(str(row["sense_id"]))
                        continue
                    cur = self._conn.execute(
                        "INSERT INTO senses (source_term_key, ordinal, gloss, "
                        "domain_tag) VALUES (?, ?, ?, ?)",
                        (s.source_term_key, s.ordinal, _nfc(s.gloss),
                         _nfc(s.domain_tag)),
                    )
                    ids.append(str(cur.lastrowid))
                self._conn.commit()
            except Exception:
                self._conn.rollback()
                raise
        return ids

    def senses_for_key(self, source_term_key: str) -> list[Sense]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT * FROM senses WHERE source_term_key = ? ORDER BY ordinal",
                (source_term_key,),
            ).fetchall()
        return [self._row_to_sense(r) for r in rows]

    def sense_by_id(self, sense_id: str) -> Sense:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM senses WHERE sense_id = ?",
                (self._int_id(sense_id),),
            ).fetchone()
        if row is None:
            raise NotFoundError(f"unknown sense_id {sense_id}")
        return self._row_to_sense(row)

    @staticmethod
    def _row_to_sense(row: sqlite3.Row) -> Sense:
        return Sense(
            sense_id=str(row["sense_id"]),
            source_term_key=row["source_term_key"],
            ordinal=row["ordinal"],
            gloss=row["gloss"],
            domain_tag=row["domain_tag"],
        )

    def set_mapping(self, entry_id: str, sense_id: str, score: float,
                    method: str, mapped_at: str) -> None:
        eid = self._int_id(entry_id)
        sid = self._int_id(sense_id)
        with self._lock:
            if self._conn.execute(
                "SELECT 1 FROM entries WHERE entry_id = ?", (eid,)
            ).fetchone() is None:
                raise NotFoundError(f"unknown entry_id {entry_id}")
            if self._conn.execute(
                "SELECT 1 FROM senses WHERE sense_id = ?", (sid,)
            ).fetchone() is None:
                raise NotFoundError(f"unknown sense_id {sense_id}")
            try:
                self._conn.execute("BEGIN")
                self._conn.execute(
                    "INSERT INTO mappings (entry_id, sense_id, score, method, "
                    "mapped_at) VALUES (?, ?, ?, ?, ?) "
                    "ON CONFLICT(entry_id) DO UPDATE SET sense_id = ?, "
                    "score = ?, method = ?, mapped_at = ?",
                    (eid, sid, score, method, mapped_at,
                     sid, score, method, mapped_at),
                )
                self._conn.execute(
                    "UPDATE entries SET sense_id = ? WHERE entry_id = ?",
                    (sid, eid),
                )
                self._conn.commit()
            except Exception:
                self._conn.rollback()
                raise

    def mapped_entry_ids(self) -> set[str]:
        with self._lock:
            rows = self._conn.execute("SELECT entry_id FROM mappings").fetchall()
        return {str(r["entry_id"]) for r in rows}

    def mapping_for_entry(self, entry_id: str) -> sqlite3.Row | None:
        with self._lock:
            return self._conn.execute(
                "SELECT * FROM mappings WHERE entry_id = ?",
                (self._int_id(entry_id),),
            ).fetchone()

    def entry_by_id(self, entry_id: str) -> TermEntry:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM entries WHERE entry_id = ?",
                (self._int_id(entry_id),),
            ).fetchone()
        if row is None:
            raise NotFoundError(f"unknown entry_id {entry_id}")
        return self._row_to_entry(row)

    # -- stats and integrity ----------------------------------------------

    def stats(self) -> StoreStats:
        with self._lock:
            counts = {}
            for name, sql in (
                ("entry_count", "SELECT COUNT(*) FROM entries"),
                ("source_count", "SELECT COUNT(*) FROM sources"),
                ("group_count", "SELECT COUNT(*) FROM term_groups"),
                ("sense_count", "SELECT COUNT(*) FROM senses"),
                ("mapped_entry_count",
                 "SELECT COUNT(*) FROM entries WHERE sense_id IS NOT NULL"),
            ):
                counts[name] = self._conn.execute(sql).fetchone()[0]
            row = self._conn.execute(
                "SELECT value FROM meta WHERE key = 'duplicate_count'"
            ).fetchone()
        counts["duplicate_count"] = int(row["value"]) if row else 0
        return StoreStats(**counts)

    def add_duplicates(self, count: int) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT INTO meta (key, value) VALUES ('duplicate_count', ?) "
                "ON CONFLICT(key) DO UPDATE SET value = CAST(value AS INTEGER) + ?",
                (str(count), count),
            )
            self._conn.commit()

    def check_referential_integrity(self) -> list[str]:
        """Full scan; returns human-readable violations (empty = healthy)."""
        problems = []
        with self._lock:
            for row in self._conn.execute(
                "SELECT entry_id FROM entries e WHERE NOT EXISTS "
                "(SELECT 1 FROM sources s WHERE s.source_id = e.source_id)"
            ):
                problems.append(f"entry {row[0]}: dangling source_id")
            for row in self._conn.execute(
                "SELECT entry_id FROM entries e WHERE NOT EXISTS "
                "(SELECT 1 FROM term_groups g "
                "WHERE g.term_group_id = e.term_group_id)"
            ):
                problems.append(f"entry {row[0]}: dangling term_group_id")
            for row in self._conn.execute(
                "SELECT entry_id FROM entries e WHERE sense_id IS NOT NULL "
                "AND NOT EXISTS (SELECT 1 FROM senses s "
                "WHERE s.sense_id = e.sense_id)"
            ):
                problems.append(f"entry {row[0]}: dangling sense_id")
            for row in self._conn.execute(
                "SELECT g.term_group_id FROM term_groups g WHERE member_count "
                "<> (SELECT COUNT(*) FROM entries e "
                "WHERE e.term_group_id = g.term_group_id)"
            ):
                problems.append(f"group {row[0]}: stale member_count")
        return problems

    def groups_digest(self) -> str:
        """Deterministic digest of the group table, for index cache keying."""
        h = sha256()
        with self._lock:
            for row in self._conn.execute(
                "SELECT term_group_id, canonical_key, display_form, lang, "
                "member_count FROM term_groups ORDER BY term_group_id"
            ):
                h.update("\x1f".join(str(v) for v in row).encode("utf-8"))
                h.update(b"\x1e")
        return h.hexdigest()

    @staticmethod
    def _int_id(opaque: str) -> int:
        try:
            return int(opaque)
        except (TypeError, ValueError):
            raise NotFoundError(f"malformed identifier {opaque!r}") from None
