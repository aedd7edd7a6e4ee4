"""Word vectors, sentence averaging, cosine similarity, and tf-idf."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .corpus import Corpus, Token
from .errors import BadVectorFile, DimensionMismatch, EmptyCorpus


@dataclass(frozen=True)
class EmbeddingTable:
    dim: int
    entries: dict  # word -> np.ndarray of shape (dim,)

    def lookup(self, word: str) -> Optional[np.ndarray]:
        """Exact match first, then lowercased fallback."""
        v = self.entries.get(word)
        if v is None:
            v = self.entries.get(word.lower())
        return v

    def __contains__(self, word):
        return self.lookup(word) is not None


def load_embeddings(stream: Iterable[str]) -> EmbeddingTable:
    """Read a plain-text vector file ("word v1 ... vd" per line).

    An optional "count dim" header line is skipped.  Duplicate words keep the
    first occurrence.
    """
    entries: dict[str, np.ndarray] = {}
    dim = None
    for lineno, raw in enumerate(stream):
        parts = raw.split()
        if not parts:
            continue
        if lineno == 0 and len(parts) == 2:
            try:
                int(parts[0]), int(parts[1])
                continue  # header
            except ValueError:
                pass
        word, values = parts[0], parts[1:]
        try:
            vec = np.array([float(x) for x in values], dtype=np.float64)
        except ValueError as e:
            raise BadVectorFile(f"unparseable float on line {lineno + 1}") from e
        if dim is None:
            dim = len(vec)
            if dim == 0:
                raise BadVectorFile("first vector line has no components")
        elif len(vec) != dim:
            raise BadVectorFile(
                f"line {lineno + 1} has {len(vec)} components, expected {dim}"
            )
        if not np.all(np.isfinite(vec)):
            raise BadVectorFile(f"non-finite component on line {lineno + 1}")
        entries.setdefault(word, vec)
    if dim is None:
        raise BadVectorFile("no vector lines found")
    return EmbeddingTable(dim=dim, entries=entries)


def avg_vector(tokens, table: EmbeddingTable) -> np.ndarray:
    """Mean of in-vocabulary token-form vectors; zero vector if none hit."""
    hits = []
    for t in tokens:
        form = t.form if isinstance(t, Token) else str(t)
        v = table.lookup(form)
        if v is not None:
            hits.append(v)
    if not hits:
        return np.zeros(table.dim)
    return np.mean(hits, axis=0)


def cosine(u, v) -> float:
    """u.v / (|u||v|), with the convention that a zero vector scores 0."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionMismatch(f"cosine of shapes {u.shape} and {v.shape}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


@dataclass(frozen=True)
class TfIdfModel:
    vocab: dict  # word -> dense column index
    idf: np.ndarray
    n_sentences: int

    def to_json(self) -> str:
        words = sorted(self.vocab, key=self.vocab.get)
        return json.dumps(
            {
                "format_version": 1,
                "vocab": words,
                "idf": list(self.idf),
                "n_sentences": self.n_sentences,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "TfIdfModel":
        obj = json.loads(text)
        vocab = {w: i for i, w in enumerate(obj["vocab"])}
        return cls(vocab=vocab, idf=np.array(obj["idf"]), n_sentences=obj["n_sentences"])


def _sentence_terms(tokens) -> list[str]:
    return [(t.form if isinstance(t, Token) else str(t)).lower() for t in tokens]


def fit_tfidf(corpus: Corpus) -> TfIdfModel:
    """Sentence-level df over lowercased forms; idf = ln((1+N)/(1+df)) + 1."""
    n = 0
    df: dict[str, int] = {}
    for sent in corpus.sentences():
        n += 1
        for w in set(_sentence_terms(sent.tokens)):
            df[w] = df.get(w, 0) + 1
    if n == 0:
        raise EmptyCorpus("cannot fit tf-idf on an empty corpus")
    vocab = {w: i for i, w in enumerate(sorted(df))}
    idf = np.empty(len(vocab))
    for w, i in vocab.items():
        idf[i] = math.log((1 + n) / (1 + df[w])) + 1
    return TfIdfModel(vocab=vocab, idf=idf, n_sentences=n)


def tfidf_vector(tokens, model: TfIdfModel) -> dict:
    """Sparse tf*idf vector as {column: weight}; unknown words dropped."""
    counts: dict[int, int] = {}
    for w in _sentence_terms(tokens):
        i = model.vocab.get(w)
        if i is not None:
            counts[i] = counts.get(i, 0) + 1
    return {i: c * model.idf[i] for i, c in counts.items()}


def sparse_cosine(a: dict, b: dict) -> float:
    na = math.sqrt(sum(x * x for x in a.values()))
    nb = math.sqrt(sum(x * x for x in b.values()))
    if na == 0.0 or nb == 0.0:
        return 0.0
    if len(a) > len(b):
        a, b = b, a
    dot = sum(v * b[i] for i, v in a.items() if i in b)
    return dot / (na * nb)
