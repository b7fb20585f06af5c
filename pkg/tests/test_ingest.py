import io
import json

import pytest

from termbase.errors import ConfigError
from termbase.ingest import (
    ParseReject,
    deduplicate,
    ingest,
    load_manifest,
    parse_corpus,
)
from termbase.models import DictionarySource, RawRecord
from termbase.store import Store

from conftest import ADSORPTION_DIR, build_adsorption_store


def records_and_rejects(stream, format="jsonl"):
    records, rejects = [], []
    for item in parse_corpus(stream, format=format):
        (rejects if isinstance(item, ParseReject) else records).append(item)
    return records, rejects


def jsonl(*objs):
    return io.StringIO("\n".join(json.dumps(o, ensure_ascii=False)
                                 for o in objs) + "\n")


def line(term, target, dictionary="D1", lang="en", definition=None):
    return {"source_term": term, "target_term": target,
            "definition": definition, "dictionary": dictionary, "lang": lang}


def test_parse_three_valid_lines():
    records, rejects = records_and_rejects(jsonl(
        line("a", "أ"), line("b", "ب"), line("c", "ج")))
    assert len(records) == 3 and not rejects
    assert records[0].line_number == 1
    assert records[2].line_number == 3


def test_parse_one_malformed_among_five():
    stream = io.StringIO(
        json.dumps(line("a", "أ")) + "\n"
        + "{not json\n"
        + json.dumps(line("b", "ب")) + "\n"
        + json.dumps(line("c", "ج")) + "\n"
        + json.dumps(line("d", "د")) + "\n"
    )
    records, rejects = records_and_rejects(stream)
    assert len(records) == 4
    assert len(rejects) == 1 and rejects[0].line_number == 2


def test_parse_empty_file():
    records, rejects = records_and_rejects(io.StringIO(""))
    assert records == [] and rejects == []


def test_parse_missing_field_rejected():
    records, rejects = records_and_rejects(jsonl(
        {"source_term": "a", "target_term": "أ", "lang": "en"}))
    assert not records and "dictionary" in rejects[0].reason


def test_parse_tsv():
    stream = io.StringIO(
        "adsorption\tامتزاز\tsticks to a surface\tD1\ten\n"
        "scale\tمقياس\t\tD1\ten\n"
        "broken line without tabs\n"
    )
    records, rejects = records_and_rejects(stream, format="tsv")
    assert len(records) == 2 and len(rejects) == 1
    assert records[0].definition == "sticks to a surface"
    assert records[1].definition is None


def test_parse_unknown_format():
    with pytest.raises(ConfigError):
        list(parse_corpus(io.StringIO(""), format="csv"))


def raw(term, target, dictionary="D1", lang="en", n=1):
    return RawRecord(source_term=term, target_term=target,
                     source_dictionary_key=dictionary, source_lang=lang,
                     line_number=n)


def test_dedup_exact_repeats():
    records = [raw("t", "ت", n=i) for i in range(1, 3)] \
        + [raw(f"u{i}", "ث", n=i + 2) for i in range(8)]
    records.append(raw("u0", "ث", n=11))
    unique, dups = deduplicate(records)
    assert (len(unique), dups) == (9, 2)
    assert unique[0].line_number == 1  # first occurrence wins


def test_dedup_keeps_cross_dictionary_attestations():
    unique, dups = deduplicate([
        raw("adsorption", "امتزاز", dictionary="D1"),
        raw("adsorption", "امتزاز", dictionary="D2"),
    ])
    assert (len(unique), dups) == (2, 0)


def test_dedup_catches_diacritic_variant():
    unique, dups = deduplicate([
        raw("adsorption", "امتزاز", dictionary="D1"),
        raw("Adsorption", "اِمْتِزاز", dictionary="D1"),
    ])
    assert (len(unique), dups) == (1, 1)


def manifest_one():
    return [("D1", DictionarySource(title="Fixture D1",
                                    languages=["en", "ar"],
                                    citation="Fixture D1 (2020)"))]


def test_ingest_adsorption_fixture(tmp_path):
    store, report = build_adsorption_store(tmp_path / "t.db", with_mapping=False)
    try:
        assert report.read_count == 34
        assert report.stored_count == 34
        assert report.duplicate_count == 0
        assert report.rejected_count == 0
        stats = store.stats()
        assert stats.entry_count == 34
        assert stats.source_count == 15
        assert stats.group_count == 4
    finally:
        store.close()


def test_ingest_twenty_percent_duplicates(tmp_path):
    # 20 read lines, 4 of them repeats: exactly a 20% duplicate rate.
    # One repeat is a diacritic variant.
    uniques = [line(f"term{i}", "كلمة" + "ابجدهوزحطيكلمنسع"[i])
               for i in range(16)]
    repeats = [
        line("term0", "كلمةا"),
        line("term1", "كلمةب"),
        line("term2", "كَلِمةج"),   # diacritic variant of كلمةج
        line("term3", "كلمةد"),
    ]
    with Store(tmp_path / "t.db") as store:
        report = ingest(store, jsonl(*(uniques + repeats)),
                        manifest=manifest_one())
        assert report.read_count == 20
        assert report.duplicate_count == 4
        assert report.duplicate_count / report.read_count == 0.20
        assert report.stored_count == 16
        assert store.stats().duplicate_count == 4


def test_reingest_same_file_all_duplicates(tmp_path):
    content = [line("a", "أول"), line("b", "ثاني"), line("c", "ثالث")]
    with Store(tmp_path / "t.db") as store:
        first = ingest(store, jsonl(*content), manifest=manifest_one())
        assert (first.stored_count, first.duplicate_count) == (3, 0)
        second = ingest(store, jsonl(*content))
        assert second.duplicate_count == second.read_count == 3
        assert second.stored_count == 0
        assert store.stats().entry_count == 3


def test_ingest_unknown_dictionary_rejected(tmp_path):
    with Store(tmp_path / "t.db") as store:
        report = ingest(store, jsonl(line("a", "أول", dictionary="NOPE")),
                        manifest=manifest_one())
        assert report.stored_count == 0
        assert report.rejected_count == 1
        assert "NOPE" in report.rejects[0][1]


def test_ingest_unsupported_lang_rejected(tmp_path):
    with Store(tmp_path / "t.db") as store:
        report = ingest(store, jsonl(line("wort", "كلمة", lang="de")),
                        manifest=manifest_one())
        assert report.rejected_count == 1


def test_report_arithmetic(tmp_path):
    stream = io.StringIO(
        json.dumps(line("a", "أول")) + "\n"
        + "garbage\n"
        + json.dumps(line("a", "أول")) + "\n"
        + json.dumps(line("b", "ثاني", lang="xx")) + "\n"
        + json.dumps(line("c", "ثالث")) + "\n"
    )
    with Store(tmp_path / "t.db") as store:
        report = ingest(store, stream, manifest=manifest_one())
    assert report.read_count == 5
    assert report.read_count == (report.stored_count
                                 + report.duplicate_count
                                 + report.rejected_count)
    assert (report.stored_count, report.duplicate_count,
            report.rejected_count) == (2, 1, 2)


def test_group_assignment_covers_exactly_matching_entries(tmp_path):
    store, _ = build_adsorption_store(tmp_path / "t.db", with_mapping=False)
    try:
        group = store.group_by_key("adsorption", "en")
        members = store.entries_by_group(group.term_group_id)
        assert len(members) == 25
        from termbase.normalize import canonical_key
        assert all(canonical_key(e.source_term, e.source_lang) == "adsorption"
                   for e in members)
        other = [e for e in store.all_entries()
                 if e.term_group_id != group.term_group_id]
        assert all(canonical_key(e.source_term, e.source_lang) != "adsorption"
                   for e in other)
    finally:
        store.close()


def test_manifest_loading():
    manifest = load_manifest(ADSORPTION_DIR / "sources.json")
    assert len(manifest) == 15
    key, source = manifest[0]
    assert key == "D01"
    assert source.citation.startswith("Unified Glossary")
