"""HTTP service with incremental multi-view query sessions.

A session fixes the similarity/fusion spec up front; views then arrive
one at a time. Each accepted view gets its arrival ordinal synchronously
and is handed to a worker pool, so feature extraction and per-view
matching overlap later add_view calls. finalize blocks until every
accepted view is processed, then reduces the cached per-view results
with exactly the same code path a batch query uses, which makes the
incremental result bit-identical to the batch result.

Endpoints (bodies are JSON unless noted):
  POST /v1/sessions                {"similarity","fusion","k","list_depth"}
  POST /v1/sessions/{id}/views     binary image or descriptor payload
  POST /v1/sessions/{id}/finalize
  GET  /v1/objects/{id}
  GET  /v1/index/status

Scores are serialized with exactly 6 decimal places.
"""

from __future__ import annotations

import json
import threading
import uuid
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, Request, Response

from .errors import (
    BadSpecError,
    DataError,
    EmptySessionError,
    MalformedPayloadError,
    NoIndexError,
    ServiceError,
    SessionFinalizedError,
    SpecInvalidError,
    UnknownObjectError,
    UnknownSessionError,
)
from .features import DetectorConfig, extract
from .features.io import MAGIC as DESCRIPTOR_MAGIC
from .features.io import DescriptorSet, loads_descriptors
from .fusion import EARLY_KINDS, LATE_SET_KINDS, ResultEntry, early_fuse
from .image import decode_image
from .index import (
    FUSION_KINDS,
    FUSION_NONE,
    IndexStore,
    rank_late_image,
    rank_late_set,
    rank_single,
    score_rows,
)
from .similarity import KINDS as SIMILARITY_KINDS
from .vocabulary import build_bow

DEFAULT_K = 10
DEFAULT_LIST_DEPTH = 100


@dataclass
class _Session:
    session_id: str
    similarity: str
    fusion: str
    k: int
    list_depth: int
    views: list[Future] = field(default_factory=list)   # index = ordinal - 1
    finalized: bool = False
    results: list[ResultEntry] | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)
    finalize_lock: threading.Lock = field(default_factory=threading.Lock)


def _parse_spec(doc) -> tuple[str, str, int, int]:
    if not isinstance(doc, dict):
        raise BadSpecError("request body must be a JSON object")
    similarity = doc.get("similarity")
    fusion = doc.get("fusion", FUSION_NONE)
    k = doc.get("k", DEFAULT_K)
    list_depth = doc.get("list_depth", DEFAULT_LIST_DEPTH)
    if similarity not in SIMILARITY_KINDS:
        raise BadSpecError(
            f"unknown similarity {similarity!r}; valid: {', '.join(SIMILARITY_KINDS)}"
        )
    if fusion not in FUSION_KINDS:
        raise BadSpecError(f"unknown fusion {fusion!r}; valid: {', '.join(FUSION_KINDS)}")
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise BadSpecError("k must be a positive integer")
    if not isinstance(list_depth, int) or isinstance(list_depth, bool) or list_depth < 1:
        raise BadSpecError("list_depth must be a positive integer")
    return similarity, fusion, k, list_depth


class SessionManager:
    """Owns the store, the live sessions, and the per-view worker pool."""

    def __init__(
        self,
        store: IndexStore | None,
        detector: DetectorConfig | None = None,
        max_workers: int = 4,
    ):
        self.store = store
        self.detector = detector or DetectorConfig()
        self.sessions: dict[str, _Session] = {}
        self.lock = threading.Lock()
        self.pool = ThreadPoolExecutor(max_workers=max_workers)

    def _require_store(self) -> IndexStore:
        if self.store is None:
            raise NoIndexError("no index loaded")
        return self.store

    def create_session(self, doc) -> str:
        self._require_store()
        similarity, fusion, k, list_depth = _parse_spec(doc)
        session = _Session(
            session_id=uuid.uuid4().hex,
            similarity=similarity,
            fusion=fusion,
            k=k,
            list_depth=list_depth,
        )
        with self.lock:
            self.sessions[session.session_id] = session
        return session.session_id

    def _get(self, session_id: str) -> _Session:
        with self.lock:
            session = self.sessions.get(session_id)
        if session is None:
            raise UnknownSessionError(session_id)
        return session

    def add_view(self, session_id: str, payload: bytes) -> int:
        session = self._get(session_id)
        store = self._require_store()
        with session.lock:
            if session.finalized:
                raise SessionFinalizedError(session_id)
        if not payload:
            raise MalformedPayloadError("empty body")
        # parse/decode synchronously so malformed payloads fail this call;
        # the slow extraction step runs on the pool
        if payload[:4] == DESCRIPTOR_MAGIC:
            pre: DescriptorSet | np.ndarray = loads_descriptors(payload)
        else:
            pre = decode_image(payload)

        def run():
            ds = pre if isinstance(pre, DescriptorSet) else extract(pre, self.detector)
            hist = build_bow(ds, store.corner_vocab, store.blob_vocab).astype(np.float64)
            row = score_rows(store, hist, session.similarity)[0]
            return hist, row

        result: Future = Future()
        with session.lock:
            if session.finalized:
                raise SessionFinalizedError(session_id)
            session.views.append(result)
            ordinal = len(session.views)

        def done(fut):
            try:
                result.set_result(fut.result())
            except BaseException as exc:   # surfaced by finalize
                result.set_exception(exc)

        self.pool.submit(run).add_done_callback(done)
        return ordinal

    def finalize(self, session_id: str) -> list[ResultEntry]:
        session = self._get(session_id)
        store = self._require_store()
        with session.finalize_lock:
            with session.lock:
                if session.results is not None:
                    return session.results
                if not session.views:
                    raise EmptySessionError(session_id)
                session.finalized = True
                views = list(session.views)
            try:
                processed = [v.result() for v in views]   # ordinal order
            except DataError as exc:
                raise MalformedPayloadError(str(exc)) from exc
            hists = [hist for hist, _ in processed]
            rows = [row for _, row in processed]
            if session.fusion == FUSION_NONE and len(hists) != 1:
                raise BadSpecError("fusion 'none' requires exactly one view")
            if session.fusion == FUSION_NONE:
                results = rank_single(store, rows[0], session.k)
            elif session.fusion in EARLY_KINDS:
                combined = early_fuse(hists, session.fusion)
                row = score_rows(store, combined, session.similarity)[0]
                results = rank_single(store, row, session.k)
            elif session.fusion in LATE_SET_KINDS:
                results = rank_late_set(store, rows, session.fusion, session.k)
            else:
                results = rank_late_image(
                    store, rows, session.fusion, session.k, session.list_depth
                )
            with session.lock:
                session.results = results
            return results


def _json_response(payload: str, status: int = 200) -> Response:
    return Response(content=payload, status_code=status, media_type="application/json")


def _error_response(exc: ServiceError) -> Response:
    body = json.dumps({"error": exc.code, "detail": str(exc)})
    return _json_response(body, status=exc.status)


def _results_json(results: list[ResultEntry], categories: dict[str, str]) -> str:
    # hand-assembled so scores carry exactly 6 decimal places on the wire
    items = ",".join(
        "{"
        + f'"object_id":{json.dumps(e.object_id)},'
        + f'"category":{json.dumps(categories.get(e.object_id, ""))},'
        + f'"score":{e.score:.6f}'
        + "}"
        for e in results
    )
    return '{"results":[' + items + "]}"


def create_app(
    store: IndexStore | None,
    detector: DetectorConfig | None = None,
    max_workers: int = 4,
) -> FastAPI:
    manager = SessionManager(store, detector=detector, max_workers=max_workers)
    app = FastAPI(title="mvsearch", docs_url=None, redoc_url=None)
    app.state.manager = manager

    @app.exception_handler(ServiceError)
    async def on_service_error(_req, exc: ServiceError):
        return _error_response(exc)

    @app.exception_handler(SpecInvalidError)
    async def on_spec_error(_req, exc: SpecInvalidError):
        return _error_response(BadSpecError(str(exc)))

    @app.exception_handler(DataError)
    async def on_data_error(_req, exc: DataError):
        return _error_response(MalformedPayloadError(str(exc)))

    @app.post("/v1/sessions")
    async def create_session(request: Request):
        try:
            doc = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            raise BadSpecError(f"body is not valid JSON: {exc}") from exc
        session_id = manager.create_session(doc)
        return _json_response(json.dumps({"session_id": session_id}))

    @app.post("/v1/sessions/{session_id}/views")
    async def add_view(session_id: str, request: Request):
        payload = await request.body()
        ordinal = manager.add_view(session_id, payload)
        return _json_response(json.dumps({"ordinal": ordinal}))

    @app.post("/v1/sessions/{session_id}/finalize")
    async def finalize(session_id: str):
        results = manager.finalize(session_id)
        store = manager._require_store()
        categories = {rec.object_id: rec.category for rec in store.records}
        return _json_response(_results_json(results, categories))

    @app.get("/v1/objects/{object_id}")
    async def get_object(object_id: str):
        store = manager._require_store()
        try:
            rec = store.record(object_id)
        except KeyError as exc:
            raise UnknownObjectError(object_id) from exc
        doc = {
            "object_id": rec.object_id,
            "category": rec.category,
            "views": [{"view_id": v.view_id, "source": v.source} for v in rec.views],
        }
        return _json_response(json.dumps(doc))

    @app.get("/v1/index/status")
    async def status():
        store = manager._require_store()
        doc = {
            "objects": len(store.records),
            "views": store.n_views,
            "vocab_bins": store.bins,
        }
        return _json_response(json.dumps(doc))

    return app
