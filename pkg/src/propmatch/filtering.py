"""Fast word-vector / tf-idf filtering: score every sentence, keep the top k."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .corpus import Corpus, DepTree, Sentence
from .embeddings import (
    EmbeddingTable,
    TfIdfModel,
    avg_vector,
    cosine,
    sparse_cosine,
    tfidf_vector,
)
from .errors import EmptyCorpus


@dataclass(frozen=True)
class PropositionQuery:
    id: str
    text: str
    tokens: tuple
    tree: Optional[DepTree] = None

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("proposition query must have at least one token")


@dataclass(frozen=True)
class ScoredSentence:
    doc_id: str
    position: int
    fast_score: float
    rank: int


class AveragingScorer:
    """Cosine of averaged word vectors."""

    name = "averaging"

    def __init__(self, table: EmbeddingTable):
        self.table = table

    def represent(self, tokens):
        return avg_vector(tokens, self.table)

    def similarity(self, query_repr, tokens) -> float:
        return cosine(query_repr, self.represent(tokens))


class TfIdfScorer:
    """Cosine of sparse tf-idf vectors."""

    name = "tfidf"

    def __init__(self, model: TfIdfModel):
        self.model = model

    def represent(self, tokens):
        return tfidf_vector(tokens, self.model)

    def similarity(self, query_repr, tokens) -> float:
        return sparse_cosine(query_repr, self.represent(tokens))


def fast_score(query: PropositionQuery, sentence: Sentence, scorer) -> float:
    return scorer.similarity(scorer.represent(query.tokens), sentence.tokens)


def top_k(query: PropositionQuery, corpus: Corpus, scorer, k: int) -> list[ScoredSentence]:
    """The k highest fast-scoring sentences, ties broken by corpus order."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if len(corpus) == 0:
        raise EmptyCorpus("cannot filter an empty corpus")
    qrep = scorer.represent(query.tokens)
    scored = []
    for order, (doc_id, pos) in enumerate(corpus.sentence_index):
        s = corpus.sentence(doc_id, pos)
        scored.append((-scorer.similarity(qrep, s.tokens), order, doc_id, pos))
    scored.sort()
    return [
        ScoredSentence(doc_id=d, position=p, fast_score=-neg, rank=i + 1)
        for i, (neg, _order, d, p) in enumerate(scored[:k])
    ]
