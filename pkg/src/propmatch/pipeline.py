"""Filter-then-rerank matching, time-binned measurement, and evaluation.

The cascade scores every sentence with a cheap scorer, keeps the top k,
reranks those k with an entailment model, and returns the top n.  Matches of
dated documents can then be counted per calendar quarter.
"""

from __future__ import annotations

import csv
import datetime
import json
from dataclasses import dataclass, field
from typing import Optional

from .corpus import Corpus, Sentence, fallback_tokenize
from .errors import BadInstance, BadLabel, EmptyCorpus, InsufficientData
from .filtering import (
    AveragingScorer,
    PropositionQuery,
    ScoredSentence,
    TfIdfScorer,
    top_k,
)
from .models import LRModel, LSTMModel, lr_score, lstm_score
from .treeedit import SearchConfig, extract_features, find_edit_sequence, vectorize_sequence

FILTERS = ("averaging", "tfidf")
RERANKERS = ("none", "lr", "lstm")


@dataclass(frozen=True)
class PipelineConfig:
    filter: str = "averaging"
    reranker: str = "none"
    k: int = 250
    n: int = 25

    def __post_init__(self):
        if self.filter not in FILTERS:
            raise ValueError(f"unknown filter {self.filter!r}")
        if self.reranker not in RERANKERS:
            raise ValueError(f"unknown reranker {self.reranker!r}")
        if not (1 <= self.n <= self.k):
            raise ValueError(f"need 1 <= n <= k, got n={self.n}, k={self.k}")


@dataclass(frozen=True)
class Resources:
    """Loaded scoring resources handed to the cascade."""

    embeddings: object = None
    tfidf: object = None
    lr_model: Optional[LRModel] = None
    lstm_model: Optional[LSTMModel] = None
    search_config: SearchConfig = field(default_factory=SearchConfig)


@dataclass(frozen=True)
class RankedMatch:
    doc_id: str
    position: int
    fast_score: float
    rerank_score: Optional[float]
    final_rank: int
    missing_parse: bool = False


@dataclass(frozen=True)
class MeasurementSeries:
    bin_start: tuple   # quarter-start dates, contiguous
    counts: tuple
    undated_matches: int


@dataclass(frozen=True)
class RatingRecord:
    rater: str
    query: str
    doc_id: str
    position: int
    score: int

    def __post_init__(self):
        if self.score not in (1, 2, 3, 4, 5):
            raise ValueError(f"rating score must be 1-5, got {self.score}")


def make_scorer(config: PipelineConfig, resources: Resources):
    if config.filter == "averaging":
        if resources.embeddings is None:
            raise ValueError("averaging filter requires an embedding table")
        return AveragingScorer(resources.embeddings)
    if resources.tfidf is None:
        raise ValueError("tfidf filter requires a fitted tf-idf model")
    return TfIdfScorer(resources.tfidf)


def _rerank_score(query: PropositionQuery, sentence: Sentence,
                  config: PipelineConfig, resources: Resources) -> float:
    seq = find_edit_sequence(sentence.tree, query.tree, resources.search_config)
    if config.reranker == "lr":
        feats = extract_features(seq, sentence.tree, query.tree)
        return lr_score(feats, resources.lr_model)
    steps = vectorize_sequence(seq, resources.embeddings)
    return lstm_score(steps, resources.lstm_model)


def match(query: PropositionQuery, corpus: Corpus, config: PipelineConfig,
          resources: Resources) -> list:
    """Fast filter to k candidates, rerank, return the top n."""
    scorer = make_scorer(config, resources)
    k = min(config.k, len(corpus)) if len(corpus) else config.k
    survivors = top_k(query, corpus, scorer, k)

    if config.reranker == "none":
        return [
            RankedMatch(s.doc_id, s.position, s.fast_score, None, i + 1)
            for i, s in enumerate(survivors[: config.n])
        ]

    if config.reranker == "lr" and resources.lr_model is None:
        raise ValueError("lr reranker requires a trained LR model")
    if config.reranker == "lstm" and resources.lstm_model is None:
        raise ValueError("lstm reranker requires a trained LSTM model")

    order = {(d, p): i for i, (d, p) in enumerate(corpus.sentence_index)}
    rescored = []
    for s in survivors:
        sentence = corpus.sentence(s.doc_id, s.position)
        missing = sentence.tree is None or query.tree is None
        if missing:
            # keep un-parsed candidates with their fast score, flagged
            score = s.fast_score
        else:
            score = _rerank_score(query, sentence, config, resources)
        rescored.append((-score, order[(s.doc_id, s.position)], s, score, missing))
    rescored.sort()
    return [
        RankedMatch(s.doc_id, s.position, s.fast_score, score, i + 1, missing)
        for i, (_neg, _ord, s, score, missing) in enumerate(rescored[: config.n])
    ]


# ---------------------------------------------------------------------------
# measurement


def _quarter_start(date: datetime.date) -> datetime.date:
    return datetime.date(date.year, 3 * ((date.month - 1) // 3) + 1, 1)


def _next_quarter(q: datetime.date) -> datetime.date:
    if q.month == 10:
        return datetime.date(q.year + 1, 1, 1)
    return datetime.date(q.year, q.month + 3, 1)


def measure(matches, corpus: Corpus) -> MeasurementSeries:
    """Count dated matches per calendar quarter; undated ones tallied apart."""
    dated = []
    undated = 0
    for m in matches:
        date = corpus.document(m.doc_id).date
        if date is None:
            undated += 1
        else:
            dated.append(_quarter_start(date))
    if not dated:
        return MeasurementSeries(bin_start=(), counts=(), undated_matches=undated)
    bins = []
    q = min(dated)
    last = max(dated)
    while q <= last:
        bins.append(q)
        q = _next_quarter(q)
    counts = [0] * len(bins)
    index = {b: i for i, b in enumerate(bins)}
    for q in dated:
        counts[index[q]] += 1
    return MeasurementSeries(bin_start=tuple(bins), counts=tuple(counts),
                             undated_matches=undated)


def measurement_to_csv(series: MeasurementSeries) -> str:
    lines = ["quarter_start,count"]
    for b, c in zip(series.bin_start, series.counts):
        lines.append(f"{b.isoformat()},{c}")
    return "\n".join(lines) + "\n"


def measurement_to_json(series: MeasurementSeries) -> str:
    return json.dumps(
        {
            "bin_start": [b.isoformat() for b in series.bin_start],
            "counts": list(series.counts),
            "undated_matches": series.undated_matches,
        }
    )


# ---------------------------------------------------------------------------
# retrieval evaluation


@dataclass(frozen=True)
class RecallInstance:
    query: PropositionQuery
    sentences: tuple       # the instance's document, as a sentence list
    relevant: frozenset    # sentence positions within the document


def _instance_top_n(instance: RecallInstance, scorer, n: int) -> list:
    qrep = scorer.represent(instance.query.tokens)
    scored = [
        (-scorer.similarity(qrep, s.tokens), i) for i, s in enumerate(instance.sentences)
    ]
    scored.sort()
    return [i for _neg, i in scored[:n]]


def recall_at_n(instances, scorer, n: int) -> float:
    """Fraction of instances whose top-n contains >= 1 relevant sentence."""
    if n < 1:
        raise ValueError("n must be >= 1")
    hits = 0
    total = 0
    for inst in instances:
        if not inst.relevant:
            raise BadInstance(f"instance {inst.query.id!r} has no relevant sentences")
        total += 1
        if set(_instance_top_n(inst, scorer, n)) & set(inst.relevant):
            hits += 1
    if total == 0:
        raise BadInstance("no instances given")
    return hits / total


def precision_at_n(queries, corpus: Corpus, annotations, scorer, n: int):
    """Per-query precision of frame labels in the top n, plus macro-average.

    ``queries``: list of (PropositionQuery, frame); ``annotations``: mapping
    (doc_id, position) -> set of labels.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    known = set()
    for labels in annotations.values():
        known |= set(labels)
    per_query = {}
    for query, frame in queries:
        if frame not in known:
            raise BadLabel(f"frame {frame!r} absent from annotations")
        top = top_k(query, corpus, scorer, n)
        hit = sum(
            1 for s in top if frame in annotations.get((s.doc_id, s.position), ())
        )
        per_query[query.id] = hit / n
    macro = sum(per_query.values()) / len(per_query) if per_query else 0.0
    return per_query, macro


# ---------------------------------------------------------------------------
# inter-rater agreement


def krippendorff_alpha_interval(ratings) -> float:
    """Krippendorff's alpha for interval data over 1-5 ratings.

    alpha = 1 - D_o / D_e with the squared-difference metric; D_o averages
    within-item disagreement (items with >= 2 ratings), D_e pools all
    pairable values with the (n - 1) small-sample correction.
    """
    by_item: dict = {}
    for r in ratings:
        key = (r.query, r.doc_id, r.position)
        by_item.setdefault(key, []).append(float(r.score))
    units = [vals for vals in by_item.values() if len(vals) >= 2]
    if len(units) < 2:
        raise InsufficientData("need >= 2 items with >= 2 ratings each")
    n = sum(len(v) for v in units)
    d_o = 0.0
    for vals in units:
        m = len(vals)
        within = sum((a - b) ** 2 for a in vals for b in vals)
        d_o += within / (m - 1)
    d_o /= n
    pooled = [v for vals in units for v in vals]
    d_e = sum((a - b) ** 2 for a in pooled for b in pooled) / (n * (n - 1))
    if d_e == 0.0:
        return 1.0
    return 1.0 - d_o / d_e


# ---------------------------------------------------------------------------
# fixture formats


def load_recall_fixture(stream) -> list:
    """JSONL: {"query": str, "sentences": [str], "relevant": [int]}."""
    out = []
    for i, line in enumerate(stream):
        if not line.strip():
            continue
        obj = json.loads(line)
        query = PropositionQuery(
            id=str(obj.get("id", i)),
            text=obj["query"],
            tokens=tuple(fallback_tokenize(obj["query"])),
        )
        sentences = tuple(
            Sentence(id=f"{i}:{j}", text=t, tokens=tuple(fallback_tokenize(t)), position=j)
            for j, t in enumerate(obj["sentences"])
        )
        out.append(
            RecallInstance(query=query, sentences=sentences,
                           relevant=frozenset(obj["relevant"]))
        )
    return out


def load_frame_fixture(annotation_stream, query_stream):
    """Frame fixture: JSONL of {"doc_id", "position", "labels"} plus a JSONL
    query file of {"query", "frame"}."""
    annotations = {}
    for line in annotation_stream:
        if not line.strip():
            continue
        obj = json.loads(line)
        annotations[(obj["doc_id"], obj["position"])] = set(obj["labels"])
    queries = []
    for i, line in enumerate(query_stream):
        if not line.strip():
            continue
        obj = json.loads(line)
        q = PropositionQuery(
            id=str(obj.get("id", i)),
            text=obj["query"],
            tokens=tuple(fallback_tokenize(obj["query"])),
        )
        queries.append((q, obj["frame"]))
    return queries, annotations


def read_ratings_csv(stream) -> list:
    """CSV columns: rater,query,doc,position,score (header optional)."""
    out = []
    for row in csv.reader(stream):
        if not row or row[0].strip().lower() == "rater":
            continue
        out.append(
            RatingRecord(
                rater=row[0], query=row[1], doc_id=row[2],
                position=int(row[3]), score=int(row[4]),
            )
        )
    return out
