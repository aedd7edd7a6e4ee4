"""JSON-over-HTTP service exposing the matching pipeline.

Endpoints:

    POST /corpora                register a corpus (documents + parses)
    GET  /corpora                list registered corpora
    POST /queries                register a proposition query
    GET  /queries/{id}/matches   ranked matches with context sentences
    GET  /queries/{id}/measurement   quarterly counts for the top matches
    POST /ratings                append one 1-5 rating
    GET  /ratings                all recorded ratings
    GET  /ratings/alpha          inter-rater agreement
    GET  /models                 registered model files

Status codes: 400 malformed body or unusable data, 404 unknown id,
409 duplicate id, 422 reranking requested without parses in strict mode.
Responses are deterministic and ordered identically to the CLI output.
"""

from __future__ import annotations

import json
from typing import Optional

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse

from .errors import DuplicateId, PropmatchError, UnknownId
from .hooks import ParserHook
from .pipeline import PipelineConfig, RatingRecord, krippendorff_alpha_interval
from .runtime import build_resources, matches_with_context, run_measurement
from .store import ProjectStore


def _status_for(exc: PropmatchError) -> int:
    if isinstance(exc, UnknownId):
        return 404
    if isinstance(exc, DuplicateId):
        return 409
    return 400


async def _json_body(request: Request) -> dict:
    try:
        body = await request.json()
    except Exception:
        raise HTTPException(status_code=400, detail="body is not valid JSON")
    if not isinstance(body, dict):
        raise HTTPException(status_code=400, detail="body must be a JSON object")
    return body


def _require(body: dict, *fields):
    for f in fields:
        if f not in body:
            raise HTTPException(status_code=400, detail=f"missing field {f!r}")


def create_app(store: ProjectStore, hook: Optional[ParserHook] = None,
               strict: bool = False) -> FastAPI:
    app = FastAPI(title="propmatch")
    hook = hook or ParserHook.from_config(store.config())

    @app.exception_handler(PropmatchError)
    async def on_domain_error(_request, exc: PropmatchError):
        return JSONResponse(status_code=_status_for(exc),
                            content={"detail": str(exc)})

    @app.post("/corpora", status_code=201)
    async def post_corpora(request: Request):
        body = await _json_body(request)
        _require(body, "id", "documents")
        docs = body["documents"]
        if not isinstance(docs, list):
            raise HTTPException(status_code=400, detail="documents must be a list")
        doc_lines = [d if isinstance(d, str) else json.dumps(d) for d in docs]
        parses = body.get("parses")
        parse_lines = parses.splitlines() if isinstance(parses, str) else parses
        try:
            store.add_corpus(body["id"], doc_lines, parse_lines)
        except (ValueError, KeyError, TypeError) as exc:
            raise HTTPException(status_code=400,
                                detail=f"unusable corpus data: {exc}")
        return store.corpus_meta(body["id"])

    @app.get("/corpora")
    async def get_corpora():
        return {"corpora": [store.corpus_meta(c) for c in store.list_corpora()]}

    @app.post("/queries", status_code=201)
    async def post_queries(request: Request):
        body = await _json_body(request)
        _require(body, "text", "corpus_id")
        conllu = body.get("conllu")
        if conllu is None and hook.available():
            conllu = hook.parse([body["text"]])
        qid = store.add_query(body["text"], body["corpus_id"], conllu=conllu,
                              query_id=body.get("id"))
        return {"id": qid, "parsed": conllu is not None}

    def _config_from_params(k, n, filter, rerank):
        try:
            return PipelineConfig(filter=filter, reranker=rerank, k=k, n=n)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    def _prepare(query_id, k, n, filter, rerank, model):
        query, corpus_id = store.load_query(query_id)
        corpus = store.load_corpus(corpus_id)
        config = _config_from_params(k, n, filter, rerank)
        if strict and config.reranker != "none" and query.tree is None:
            raise HTTPException(
                status_code=422,
                detail="reranking requires a parsed query (no parse available)",
            )
        resources = build_resources(store, corpus_id, config, model_name=model)
        return query, corpus, config, resources

    @app.get("/queries/{query_id}/matches")
    async def get_matches(query_id: str, k: int = 250, n: int = 25,
                          filter: str = "averaging", rerank: str = "none",
                          model: Optional[str] = None):
        query, corpus, config, resources = _prepare(query_id, k, n, filter,
                                                    rerank, model)
        return {"query": query_id,
                "matches": matches_with_context(query, corpus, config, resources)}

    @app.get("/queries/{query_id}/measurement")
    async def get_measurement(query_id: str, k: int = 250, n: int = 50,
                              filter: str = "averaging", rerank: str = "none",
                              model: Optional[str] = None):
        query, corpus, config, resources = _prepare(query_id, k, n, filter,
                                                    rerank, model)
        out = run_measurement(query, corpus, config, resources)
        out["query"] = query_id
        return out

    @app.post("/ratings", status_code=201)
    async def post_ratings(request: Request):
        body = await _json_body(request)
        _require(body, "rater", "query", "doc_id", "position", "score")
        try:
            record = RatingRecord(rater=str(body["rater"]),
                                  query=str(body["query"]),
                                  doc_id=str(body["doc_id"]),
                                  position=int(body["position"]),
                                  score=int(body["score"]))
        except (TypeError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        store.append_rating(record)
        return {"status": "recorded"}

    @app.get("/ratings")
    async def get_ratings():
        return {"ratings": [vars(r) for r in store.load_ratings()]}

    @app.get("/ratings/alpha")
    async def get_alpha():
        return {"alpha": krippendorff_alpha_interval(store.load_ratings())}

    @app.get("/models")
    async def get_models():
        return {"models": store.list_models()}

    return app
