import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from termbase.errors import InvalidQueryError, ValidationError
from termbase.search import SearchIndex, levenshtein

from genstores import random_groups, random_query
from reference import candidate_tuple, levenshtein_ref, lookup_ref


@given(st.text(max_size=18), st.text(max_size=18))
def test_levenshtein_matches_textbook(a, b):
    assert levenshtein(a, b) == levenshtein_ref(a, b)


@given(st.text(max_size=14), st.text(max_size=14),
       st.integers(min_value=0, max_value=6))
def test_levenshtein_cutoff_semantics(a, b, cutoff):
    full = levenshtein_ref(a, b)
    bounded = levenshtein(a, b, cutoff=cutoff)
    if full <= cutoff:
        assert bounded == full
    else:
        assert bounded == cutoff + 1


def test_index_covers_adsorption_fixture_keys(adsorption_index):
    hits = adsorption_index.lookup("adsorption", "en", limit=10)
    keys = {h.display_form.lower() for h in hits}
    assert {"adsorption", "carbon adsorption", "adsorption drying",
            "adsorption medium"} <= keys


def test_lookup_ranking_on_adsorption_fixture(adsorption_index):
    hits = adsorption_index.lookup("adsorption", "en", limit=10)
    assert hits[0].match_kind == "exact"
    assert hits[0].edit_distance == 0
    assert hits[0].member_count == 25
    # Containment ties break lexicographically on the canonical key.
    containment = [h.display_form.lower() for h in hits
                   if h.match_kind == "containment"]
    assert containment == ["adsorption drying", "adsorption medium",
                           "carbon adsorption"]


def test_lookup_typo_finds_fuzzy_match(adsorption_index):
    hits = adsorption_index.lookup("adsorbtion", "en", limit=5)
    assert hits[0].match_kind == "fuzzy"
    assert hits[0].display_form.lower() == "adsorption"
    assert hits[0].edit_distance == 1


def test_lookup_nothing_within_threshold(adsorption_index):
    assert adsorption_index.lookup("zzzz", "en", limit=5) == []


def test_lookup_empty_query_rejected(adsorption_index):
    with pytest.raises(InvalidQueryError):
        adsorption_index.lookup("...", "en", limit=5)


def test_lookup_limit_validated(adsorption_index):
    with pytest.raises(ValidationError):
        adsorption_index.lookup("adsorption", "en", limit=0)


def test_lookup_arabic_diacritics_cannot_hide_match(adsorption_store):
    index = SearchIndex.build(adsorption_store)
    plain = index.lookup("adsorption", "en", limit=5)
    decorated = index.lookup("ADSORPTION", "en", limit=5)
    assert [candidate_tuple(c) for c in plain] == \
        [candidate_tuple(c) for c in decorated]


def test_empty_store_gives_empty_index():
    index = SearchIndex([], digest="empty")
    assert index.lookup("anything", "en", limit=5) == []


def test_single_group_found_at_distance_zero():
    from termbase.models import TermGroup
    group = TermGroup(term_group_id="1", canonical_key="scale",
                      display_form="Scale", lang="en", member_count=3)
    index = SearchIndex([group])
    [hit] = index.lookup("Scale", "en", limit=5)
    assert (hit.match_kind, hit.edit_distance) == ("exact", 0)


def test_oracle_equivalence_small_sweep():
    rng = random.Random(1234)
    for _ in range(25):
        groups = random_groups(rng, rng.randint(1, 120))
        index = SearchIndex(groups)
        for _ in range(20):
            query, lang = random_query(rng, groups)
            from termbase.normalize import canonical_key
            if not canonical_key(query, lang):
                continue
            got = [candidate_tuple(c)
                   for c in index.lookup(query, lang, limit=30)]
            want = lookup_ref(groups, query, lang, limit=30)
            assert got == want, (query, lang)


def test_exact_match_supremacy():
    rng = random.Random(99)
    groups = random_groups(rng, 60)
    index = SearchIndex(groups)
    for group in groups[:20]:
        hits = index.lookup(group.canonical_key, group.lang, limit=5)
        assert hits[0].term_group_id == group.term_group_id
        assert hits[0].match_kind == "exact"


def test_threshold_soundness():
    rng = random.Random(7)
    groups = random_groups(rng, 80)
    index = SearchIndex(groups)
    for _ in range(40):
        query, lang = random_query(rng, groups)
        from termbase.normalize import canonical_key
        key = canonical_key(query, lang)
        if not key:
            continue
        for hit in index.lookup(query, lang, limit=50):
            if hit.match_kind == "fuzzy":
                assert hit.edit_distance <= index.fuzzy_threshold(key)


def test_vectorized_scan_matches_reference_at_scale():
    # Enough keys that the numpy DP path runs, not the small-n loop.
    from termbase.search import _FuzzyScan
    rng = random.Random(31337)
    groups = random_groups(rng, 2000, langs=("en",))
    keys = [g.canonical_key for g in groups]
    scan = _FuzzyScan(keys)
    for _ in range(30):
        query, _lang = random_query(rng, groups)
        from termbase.normalize import canonical_key
        key = canonical_key(query, "en")
        if not key:
            continue
        for radius in (1, 2, 3):
            got = sorted(scan.within(key, radius))
            want = sorted(
                (k, levenshtein_ref(key, k)) for k in keys
                if levenshtein_ref(key, k) <= radius
            )
            assert got == want, (key, radius)


def test_lookup_deterministic(adsorption_index):
    first = [candidate_tuple(c)
             for c in adsorption_index.lookup("adsorption", "en", limit=10)]
    second = [candidate_tuple(c)
              for c in adsorption_index.lookup("adsorption", "en", limit=10)]
    assert first == second


def test_serialize_deterministic_across_rebuilds(adsorption_store):
    a = SearchIndex.build(adsorption_store)
    b = SearchIndex.build(adsorption_store)
    assert a.serialize() == b.serialize()


def test_cache_roundtrip(adsorption_store, tmp_path):
    index = SearchIndex.build(adsorption_store)
    cache = tmp_path / "index.cache"
    index.save_cache(cache)
    loaded = SearchIndex.load_cache(cache, expected_digest=index.digest)
    assert loaded is not None
    assert loaded.serialize() == index.serialize()
    got = [candidate_tuple(c) for c in loaded.lookup("adsorption", "en", 10)]
    want = [candidate_tuple(c) for c in index.lookup("adsorption", "en", 10)]
    assert got == want


def test_cache_rejected_on_digest_mismatch(adsorption_store, tmp_path):
    index = SearchIndex.build(adsorption_store)
    cache = tmp_path / "index.cache"
    index.save_cache(cache)
    assert SearchIndex.load_cache(cache, expected_digest="different") is None
