"""HTTP query service: read-only JSON API over a store snapshot.

Stateless by construction; every 4xx body is {"error": code, "message":
text} with codes from the shared error taxonomy.  Cross-origin reads are
open so the companion UI can be served from anywhere.
"""

from __future__ import annotations

import logging

from fastapi import FastAPI, Response
from fastapi.middleware.cors import CORSMiddleware

from . import pipeline
from .config import ServiceConfig
from .errors import NotFoundError, TermbaseError
from .search import SearchIndex
from .store import Store
from .wire import dumps_canonical, error_body, query_result_to_dict, stats_to_dict

logger = logging.getLogger(__name__)


def _json(payload, status_code: int = 200) -> Response:
    return Response(
        content=dumps_canonical(payload),
        status_code=status_code,
        media_type="application/json; charset=utf-8",
    )


def create_app(store: Store, index: SearchIndex,
               config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    app = FastAPI(title="termbase", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET"],
        allow_headers=["*"],
    )

    @app.get("/api/v1/search")
    def search(q: str = "", lang: str = "en", limit: int | None = None):
        effective = config.max_results if limit is None else limit
        effective = min(effective, config.max_results)
        try:
            result = pipeline.query(store, index, q, lang, limit=effective)
        except TermbaseError as exc:
            return _json(error_body(exc.code, exc.message), status_code=400)
        return _json(query_result_to_dict(result))

    @app.get("/api/v1/terms/{term_group_id}")
    def terms(term_group_id: str):
        try:
            detail = pipeline.term_detail(store, term_group_id)
        except NotFoundError as exc:
            return _json(error_body(exc.code, exc.message), status_code=404)
        return _json(detail)

    @app.get("/api/v1/stats")
    def stats():
        return _json(stats_to_dict(store.stats()))

    @app.get("/healthz")
    def healthz():
        return _json({"status": "ok", "entries": store.stats().entry_count})

    return app


def serve(config: ServiceConfig) -> None:
    """Open the store read-only (pinning it shared), build the index, run."""
    import uvicorn

    logging.basicConfig(level=config.log_level.upper())
    store = Store(config.store_path, readonly=True, shared_lock=True)
    index = SearchIndex.build(store, fuzzy_ratio=config.fuzzy_threshold_ratio)
    logger.info("serving %s groups from %s on %s",
                len(store.all_groups()), config.store_path,
                config.listen_address)
    app = create_app(store, index, config)
    try:
        uvicorn.run(app, host=config.host, port=config.port,
                    log_level=config.log_level)
    finally:
        store.close()
