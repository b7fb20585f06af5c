"""Canonical JSON rendering shared by the CLI and the HTTP service.

Both surfaces serialize through :func:`dumps_canonical`, so for the same
store snapshot the bytes match exactly apart from the timing field.
Arabic text stays unescaped.
"""

from __future__ import annotations

import json
from dataclasses import asdict

from .models import Candidate, QueryResult, SenseBucket, StoreStats, TermGroup


def dumps_canonical(payload) -> str:
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"


def group_to_dict(group: TermGroup | None) -> dict | None:
    if group is None:
        return None
    return {
        "term_group_id": group.term_group_id,
        "canonical_key": group.canonical_key,
        "display_form": group.display_form,
        "lang": group.lang,
        "member_count": group.member_count,
    }


def candidate_to_dict(candidate: Candidate) -> dict:
    return {
        "term_group_id": candidate.term_group_id,
        "display_form": candidate.display_form,
        "match_kind": candidate.match_kind,
        "edit_distance": candidate.edit_distance,
        "member_count": candidate.member_count,
    }


def sense_bucket_to_dict(bucket: SenseBucket) -> dict:
    return {
        "sense_id": bucket.sense_id,
        "ordinal": bucket.ordinal,
        "gloss": bucket.gloss,
        "domain_tag": bucket.domain_tag,
        "instance_count": bucket.instance_count,
        "equivalents": [
            {
                "normalized_form": eq.normalized_form,
                "display_form": eq.display_form,
                "count": eq.count,
                "citations": [
                    {
                        "source_id": c.source_id,
                        "citation": c.citation,
                        "original_spelling": c.original_spelling,
                    }
                    for c in eq.citations
                ],
            }
            for eq in bucket.equivalents
        ],
    }


def query_result_to_dict(result: QueryResult) -> dict:
    return {
        "query": result.query,
        "lang": result.lang,
        "approximate": result.approximate,
        "matched_group": group_to_dict(result.matched_group),
        "candidates": [candidate_to_dict(c) for c in result.candidates],
        "senses": [sense_bucket_to_dict(b) for b in result.senses],
        "recommendation": result.recommendation,
        "timing_ms": result.timing_ms,
    }


def stats_to_dict(stats: StoreStats) -> dict:
    return asdict(stats)


def error_body(code: str, message: str) -> dict:
    return {"error": code, "message": message}
