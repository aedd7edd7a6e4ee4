"""Shared assembly between the CLI and the HTTP service.

Both front ends resolve stored artifacts into pipeline Resources and format
matches the same way, so their outputs agree exactly.
"""

from __future__ import annotations

import json
from typing import Optional

from .corpus import Corpus
from .errors import UnknownId
from .filtering import PropositionQuery
from .models import LRModel, LSTMModel
from .pipeline import PipelineConfig, Resources, match, measure, measurement_to_json
from .store import ProjectStore
from .treeedit import SearchConfig


def build_resources(store: ProjectStore, corpus_id: str, config: PipelineConfig,
                    model_name: Optional[str] = None,
                    search_config: Optional[SearchConfig] = None) -> Resources:
    """Load exactly the artifacts the given pipeline configuration needs."""
    embeddings = None
    if config.filter == "averaging" or config.reranker == "lstm":
        embeddings = store.load_embedding_table()
    tfidf = store.load_tfidf(corpus_id) if config.filter == "tfidf" else None
    lr_model = None
    lstm_model = None
    if config.reranker == "lr":
        model = store.load_model(model_name or "lr")
        if not isinstance(model, LRModel):
            raise UnknownId(f"model {model_name or 'lr'!r} is not a logistic model")
        lr_model = model
    elif config.reranker == "lstm":
        model = store.load_model(model_name or "lstm")
        if not isinstance(model, LSTMModel):
            raise UnknownId(f"model {model_name or 'lstm'!r} is not a sequence model")
        lstm_model = model
    return Resources(embeddings=embeddings, tfidf=tfidf, lr_model=lr_model,
                     lstm_model=lstm_model,
                     search_config=search_config or SearchConfig())


def matches_with_context(query: PropositionQuery, corpus: Corpus,
                         config: PipelineConfig, resources: Resources) -> list:
    """Ranked matches as plain dicts, each with its neighbouring sentences."""
    rows = []
    for m in match(query, corpus, config, resources):
        doc = corpus.document(m.doc_id)
        before = doc.sentences[m.position - 1].text if m.position > 0 else None
        after = (doc.sentences[m.position + 1].text
                 if m.position + 1 < len(doc.sentences) else None)
        rows.append({
            "rank": m.final_rank,
            "doc_id": m.doc_id,
            "position": m.position,
            "date": doc.date.isoformat() if doc.date else None,
            "fast_score": m.fast_score,
            "rerank_score": m.rerank_score,
            "missing_parse": m.missing_parse,
            "sentence": doc.sentences[m.position].text,
            "context_before": before,
            "context_after": after,
        })
    return rows


def run_measurement(query: PropositionQuery, corpus: Corpus,
                    config: PipelineConfig, resources: Resources) -> dict:
    matches = match(query, corpus, config, resources)
    series = measure(matches, corpus)
    return json.loads(measurement_to_json(series))
