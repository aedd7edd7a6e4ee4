import json
import random

import numpy as np
import pytest

from propmatch.corpus import fallback_tokenize, ingest_corpus
from propmatch.embeddings import EmbeddingTable, avg_vector, cosine, fit_tfidf
from propmatch.errors import EmptyCorpus
from propmatch.filtering import (
    AveragingScorer,
    PropositionQuery,
    TfIdfScorer,
    fast_score,
    top_k,
)


def make_query(text):
    return PropositionQuery(id="q", text=text, tokens=tuple(fallback_tokenize(text)))


def corpus_from_texts(texts, doc_id="d"):
    doc = {"id": doc_id, "sentences": texts}
    return ingest_corpus([json.dumps(doc)])


def random_table(words, dim=4, seed=0):
    rng = np.random.default_rng(seed)
    return EmbeddingTable(
        dim=dim, entries={w: rng.normal(size=dim) for w in words}
    )


WORDS = [f"w{i}" for i in range(20)]


def random_corpus(n_sentences, seed=1):
    rng = random.Random(seed)
    texts = [
        " ".join(rng.choices(WORDS, k=rng.randint(2, 6))) for _ in range(n_sentences)
    ]
    return corpus_from_texts(texts), texts


def test_identical_sentence_scores_one():
    table = random_table(WORDS)
    corpus, texts = random_corpus(5)
    query = make_query(texts[2])
    s = corpus.sentence("d", 2)
    assert fast_score(query, s, AveragingScorer(table)) == pytest.approx(1.0, abs=1e-9)


def test_no_overlap_scores_zero():
    table = random_table(WORDS)
    corpus = corpus_from_texts(["w0 w1"])
    query = make_query("unknownword anotherunknown")
    s = corpus.sentence("d", 0)
    assert fast_score(query, s, AveragingScorer(table)) == 0.0


def test_ranking_matches_brute_force_cosines():
    table = random_table(WORDS)
    corpus, texts = random_corpus(3, seed=7)
    query = make_query("w0 w3 w5")
    qvec = avg_vector(query.tokens, table)
    expected = sorted(
        range(3),
        key=lambda i: (-cosine(qvec, avg_vector(corpus.sentence("d", i).tokens, table)), i),
    )
    result = top_k(query, corpus, AveragingScorer(table), 3)
    assert [r.position for r in result] == expected


@pytest.mark.parametrize("k", [1, 2, 5, 25, 100, 150])
def test_top_k_equals_full_sort_truncation(k):
    table = random_table(WORDS, seed=3)
    corpus, _ = random_corpus(100, seed=5)
    scorer = AveragingScorer(table)
    query = make_query("w1 w2 w3")
    qvec = avg_vector(query.tokens, table)
    scores = [
        cosine(qvec, avg_vector(corpus.sentence(d, p).tokens, table))
        for d, p in corpus.sentence_index
    ]
    oracle = sorted(range(len(scores)), key=lambda i: (-scores[i], i))[:k]
    result = top_k(query, corpus, scorer, k)
    assert [r.position for r in result] == oracle
    assert [r.rank for r in result] == list(range(1, len(result) + 1))
    # scores non-increasing with rank
    for a, b in zip(result, result[1:]):
        assert a.fast_score >= b.fast_score


def test_top_k_prefix_property():
    table = random_table(WORDS, seed=9)
    corpus, _ = random_corpus(30, seed=11)
    scorer = AveragingScorer(table)
    query = make_query("w4 w5")
    prev = []
    for k in range(1, 31):
        cur = top_k(query, corpus, scorer, k)
        assert [(c.doc_id, c.position) for c in cur[: len(prev)]] == [
            (p.doc_id, p.position) for p in prev
        ]
        prev = cur


def test_tie_broken_by_corpus_order():
    table = random_table(["x", "y"])
    corpus = corpus_from_texts(["x y", "x y", "x y"])
    result = top_k(make_query("x y"), corpus, AveragingScorer(table), 2)
    assert [(r.position, r.rank) for r in result] == [(0, 1), (1, 2)]


def test_empty_corpus_raises():
    table = random_table(WORDS)
    with pytest.raises(EmptyCorpus):
        top_k(make_query("w0"), ingest_corpus([]), AveragingScorer(table), 1)


def test_determinism():
    table = random_table(WORDS, seed=13)
    corpus, _ = random_corpus(40, seed=17)
    scorer = AveragingScorer(table)
    query = make_query("w7 w8 w9")
    a = top_k(query, corpus, scorer, 10)
    b = top_k(query, corpus, scorer, 10)
    assert a == b


def test_tfidf_scorer_self_match_tops():
    corpus, texts = random_corpus(10, seed=23)
    model = fit_tfidf(corpus)
    scorer = TfIdfScorer(model)
    query = make_query(texts[4])
    result = top_k(query, corpus, scorer, 1)
    assert result[0].fast_score == pytest.approx(1.0, abs=1e-9)
