"""Command-line tools around the store, pipeline, and service."""

from __future__ import annotations

import json
import sys
from contextlib import contextmanager
from pathlib import Path

import click

from . import pipeline
from .ingest import ingest as run_ingest
from .ingest import load_manifest
from .config import ServiceConfig, load_config
from .errors import TermbaseError
from .llm import LlmBackend
from .search import SearchIndex
from .senses import (
    LexicalBackend,
    evaluate_mapping,
    load_sense_inventory,
    map_all,
)
from .store import Store
from .wire import (
    dumps_canonical,
    error_body,
    query_result_to_dict,
    stats_to_dict,
)


def _fail(exc: TermbaseError) -> None:
    click.echo(dumps_canonical(error_body(exc.code, exc.message)),
               nl=False, err=True)
    sys.exit(1)


@contextmanager
def _handling_errors():
    """Machine-readable error on stderr and a nonzero exit, never a traceback."""
    try:
        yield
    except TermbaseError as exc:
        _fail(exc)
    except (OSError, UnicodeDecodeError) as exc:
        click.echo(dumps_canonical(error_body("io", str(exc))),
                   nl=False, err=True)
        sys.exit(1)


@click.group()
def main() -> None:
    """Terminology standardization engine."""


@main.command("ingest")
@click.argument("paths", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
@click.option("--store", "store_path", default="termbase.db", show_default=True)
@click.option("--format", "corpus_format", default="jsonl",
              type=click.Choice(["jsonl", "tsv"]), show_default=True)
@click.option("--manifest", type=click.Path(exists=True, dir_okay=False),
              help="JSON sidecar with dictionary source records.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable report.")
def cli_ingest(paths, store_path, corpus_format, manifest, as_json):
    """Parse corpus files, deduplicate, and load the store."""
    with _handling_errors():
        manifest_data = load_manifest(manifest) if manifest else None
        totals = {"read_count": 0, "stored_count": 0, "duplicate_count": 0,
                  "rejected_count": 0, "rejects": []}
        with Store(store_path) as store:
            for path in paths:
                with open(path, encoding="utf-8") as fh:
                    report = run_ingest(store, fh, format=corpus_format,
                                        manifest=manifest_data)
                manifest_data = None
                totals["read_count"] += report.read_count
                totals["stored_count"] += report.stored_count
                totals["duplicate_count"] += report.duplicate_count
                totals["rejected_count"] += report.rejected_count
                totals["rejects"] += [
                    {"file": path, "line": line, "reason": reason}
                    for line, reason in report.rejects
                ]
    if as_json:
        click.echo(dumps_canonical(totals), nl=False)
    else:
        click.echo(
            f"read {totals['read_count']}  stored {totals['stored_count']}  "
            f"duplicates {totals['duplicate_count']}  "
            f"rejected {totals['rejected_count']}"
        )
        for reject in totals["rejects"]:
            click.echo(f"  reject {reject['file']}:{reject['line']}: "
                       f"{reject['reason']}", err=True)


@main.command("build-index")
@click.option("--store", "store_path", default="termbase.db", show_default=True)
@click.option("--cache", "cache_path", type=click.Path(dir_okay=False),
              help="Write the serialized index here, keyed by snapshot digest.")
def cli_build_index(store_path, cache_path):
    """Build the search index from the current store snapshot."""
    with _handling_errors():
        with Store(store_path, readonly=True) as store:
            index = SearchIndex.build(store)
            n_groups = len(store.all_groups())
        if cache_path:
            index.save_cache(cache_path)
    if cache_path:
        click.echo(f"indexed {n_groups} groups -> {cache_path} "
                   f"(digest {index.digest[:12]})")
    else:
        click.echo(f"indexed {n_groups} groups (digest {index.digest[:12]})")


@main.command("map-senses")
@click.option("--store", "store_path", default="termbase.db", show_default=True)
@click.option("--inventory", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--backend", "backend_name", default="lexical",
              type=click.Choice(["lexical", "llm"]), show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="Service config (required for the llm backend).")
@click.option("--batch-size", default=100, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Machine-readable report.")
def cli_map_senses(store_path, inventory, backend_name, config_path,
                   batch_size, as_json):
    """Load a sense inventory and assign senses to unmapped entries."""
    with _handling_errors():
        with open(inventory, encoding="utf-8") as fh:
            inv = load_sense_inventory(fh)
        if backend_name == "lexical":
            backend = LexicalBackend()
        else:
            config = load_config(config_path) if config_path else ServiceConfig()
            backend = LlmBackend(config.llm)
        with Store(store_path) as store:
            report = map_all(store, inv, backend, batch_size=batch_size)
    if as_json:
        click.echo(dumps_canonical({
            "mapped_count": report.mapped_count,
            "skipped_already_mapped": report.skipped_already_mapped,
            "unmappable_no_senses": report.unmappable_no_senses,
            "unmappable_no_definition": report.unmappable_no_definition,
            "low_confidence_count": report.low_confidence_count,
            "failures": [
                {"entry_id": entry_id, "reason": reason}
                for entry_id, reason in report.failures
            ],
        }), nl=False)
        return
    click.echo(
        f"mapped {report.mapped_count}  "
        f"already-mapped {report.skipped_already_mapped}  "
        f"no-senses {report.unmappable_no_senses}  "
        f"no-definition {report.unmappable_no_definition}  "
        f"low-confidence {report.low_confidence_count}  "
        f"failed {len(report.failures)}"
    )
    for entry_id, reason in report.failures:
        click.echo(f"  failed entry {entry_id}: {reason}", err=True)


@main.command("eval")
@click.option("--store", "store_path", default="termbase.db", show_default=True)
@click.option("--gold", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True)
def cli_eval(store_path, gold, as_json):
    """Score stored sense assignments against a gold mapping file."""
    with _handling_errors():
        with Store(store_path, readonly=True) as store:
            with open(gold, encoding="utf-8") as fh:
                report = evaluate_mapping(fh, store)
    if as_json:
        click.echo(dumps_canonical({
            "total": report.total,
            "correct": report.correct,
            "accuracy": report.accuracy,
            "confusion": [
                {"gold": g, "predicted": p, "count": n}
                for g, p, n in report.confusion
            ],
            "unknown_entries": report.unknown_entries,
        }), nl=False)
        return
    click.echo(f"accuracy {report.accuracy:.3f} "
               f"({report.correct}/{report.total})")
    if report.unknown_entries:
        click.echo(f"unknown entries: {len(report.unknown_entries)}", err=True)
    for gold_id, predicted_id, count in report.confusion:
        marker = "=" if gold_id == predicted_id else "!"
        click.echo(f"  {marker} gold {gold_id} -> predicted {predicted_id}: "
                   f"{count}")


@main.command("query")
@click.argument("term")
@click.option("--store", "store_path", default="termbase.db", show_default=True)
@click.option("--lang", default="en", show_default=True)
@click.option("--limit", default=50, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def cli_query(term, store_path, lang, limit, as_json):
    """Run the five-step lookup and print the staged result."""
    with _handling_errors():
        with Store(store_path, readonly=True) as store:
            index = SearchIndex.build(store)
            result = pipeline.query(store, index, term, lang, limit=limit)
    if as_json:
        click.echo(dumps_canonical(query_result_to_dict(result)), nl=False)
        return

    click.echo(f"query: {result.query} [{result.lang}]"
               + ("  (approximate match)" if result.approximate else ""))
    click.echo("step 1 - candidates:")
    for c in result.candidates:
        click.echo(f"  {c.display_form:<30} {c.match_kind:<12} "
                   f"distance {c.edit_distance}  {c.member_count} instances")
    if result.matched_group is None:
        click.echo("no match")
        return
    g = result.matched_group
    click.echo(f"step 2 - selected group: {g.display_form} "
               f"({g.member_count} instances)")
    click.echo("step 3 - senses by frequency:")
    for bucket in result.senses:
        tag = f" [{bucket.domain_tag}]" if bucket.domain_tag else ""
        click.echo(f"  {bucket.instance_count:>3}  {bucket.gloss}{tag}")
    click.echo("step 4 - equivalents per sense:")
    for bucket in result.senses:
        click.echo(f"  {bucket.gloss}:")
        for eq in bucket.equivalents:
            click.echo(f"    {eq.count:>3}  {eq.display_form}")
    click.echo(f"step 5 - recommendation: {result.recommendation or '(none)'}")


@main.command("export")
@click.option("--store", "store_path", default="termbase.db", show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--manifest-out", type=click.Path(dir_okay=False),
              help="Also write the dictionary sources as a manifest JSON.")
def cli_export(store_path, out, manifest_out):
    """Dump the store as canonical corpus JSON-lines for round-tripping."""
    with _handling_errors():
        with Store(store_path, readonly=True) as store:
            entries = store.all_entries()
            key_of = {s.source_id: (store.source_key_of(s.source_id)
                                    or s.source_id)
                      for s in store.list_sources()}
            with open(out, "w", encoding="utf-8") as fh:
                for entry in entries:
                    fh.write(json.dumps({
                        "source_term": entry.source_term,
                        "target_term": entry.target_term,
                        "definition": entry.definition,
                        "dictionary": key_of[entry.source_id],
                        "lang": entry.source_lang,
                    }, ensure_ascii=False) + "\n")
            if manifest_out:
                manifest = []
                for source in store.list_sources():
                    manifest.append({
                        "key": key_of[source.source_id],
                        "title": source.title,
                        "languages": source.languages,
                        "year": source.year,
                        "publisher": source.publisher,
                        "citation": source.citation,
                    })
                Path(manifest_out).write_text(
                    json.dumps(manifest, ensure_ascii=False, indent=2) + "\n",
                    encoding="utf-8",
                )
    click.echo(f"exported {len(entries)} entries -> {out}")


@main.command("stats")
@click.option("--store", "store_path", default="termbase.db", show_default=True)
@click.option("--json", "as_json", is_flag=True)
def cli_stats(store_path, as_json):
    """Print store counts."""
    with _handling_errors():
        with Store(store_path, readonly=True) as store:
            stats = store.stats()
    if as_json:
        click.echo(dumps_canonical(stats_to_dict(stats)), nl=False)
    else:
        for name, value in stats_to_dict(stats).items():
            click.echo(f"{name:<20} {value}")


@main.command("serve")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
def cli_serve(config_path):
    """Run the HTTP query service."""
    from .server import serve

    try:
        config = load_config(config_path)
        serve(config)
    except TermbaseError as exc:
        _fail(exc)
    except OSError as exc:
        click.echo(dumps_canonical(error_body("bind", str(exc))),
                   nl=False, err=True)
        sys.exit(1)


@main.command("senses-from-wiktextract")
@click.argument("dump", type=click.Path(exists=True, dir_okay=False))
@click.argument("out", type=click.Path(dir_okay=False))
@click.option("--lang", default="en", show_default=True)
def cli_senses_from_wiktextract(dump, out, lang):
    """Convert a wiktextract-style JSONL dump into the sense inventory format.

    Expects one JSON object per line with "word" and "senses" (each sense
    carrying "glosses" and optional "topics"); builds fixture inventories,
    not production-scale extractions.
    """
    written = 0
    with _handling_errors(), open(dump, encoding="utf-8") as fh, \
            open(out, "w", encoding="utf-8") as out_fh:
        for line in fh:
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                word = obj["word"]
                raw_senses = obj.get("senses", [])
            except (json.JSONDecodeError, KeyError, TypeError):
                continue
            ordinal = 0
            for sense in raw_senses:
                glosses = sense.get("glosses") or []
                if not glosses:
                    continue
                ordinal += 1
                topics = sense.get("topics") or []
                out_fh.write(json.dumps({
                    "term": word,
                    "ordinal": ordinal,
                    "gloss": glosses[0],
                    "domain": topics[0] if topics else None,
                    "lang": lang,
                }, ensure_ascii=False) + "\n")
                written += 1
    click.echo(f"wrote {written} senses -> {out}")


if __name__ == "__main__":
    main()
