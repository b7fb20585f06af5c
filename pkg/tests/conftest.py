from __future__ import annotations

from pathlib import Path

import pytest

from termbase.ingest import ingest, load_manifest
from termbase.models import IngestReport
from termbase.search import SearchIndex
from termbase.senses import LexicalBackend, load_sense_inventory, map_all
from termbase.store import Store

DATA_DIR = Path(__file__).parent / "data"
ADSORPTION_DIR = DATA_DIR / "adsorption"


def build_adsorption_store(store_path: Path,
                       with_mapping: bool = True) -> tuple[Store, IngestReport]:
    """Ingest the adsorption fixture corpus and (optionally) map senses."""
    store = Store(store_path)
    manifest = load_manifest(ADSORPTION_DIR / "sources.json")
    with open(ADSORPTION_DIR / "corpus.jsonl", encoding="utf-8") as fh:
        report = ingest(store, fh, format="jsonl", manifest=manifest)
    if with_mapping:
        with open(ADSORPTION_DIR / "senses.jsonl", encoding="utf-8") as fh:
            inventory = load_sense_inventory(fh)
        map_all(store, inventory, LexicalBackend())
    return store, report


@pytest.fixture(scope="session")
def adsorption_store_path(tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp("adsorption_fixture") / "adsorption_fixture.db"
    store, report = build_adsorption_store(path)
    assert report.stored_count == 34, report
    store.close()
    return path


@pytest.fixture(scope="session")
def adsorption_store(adsorption_store_path) -> Store:
    store = Store(adsorption_store_path, readonly=True)
    yield store
    store.close()


@pytest.fixture(scope="session")
def adsorption_index(adsorption_store) -> SearchIndex:
    return SearchIndex.build(adsorption_store)
