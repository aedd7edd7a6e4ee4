"""End-to-end matching and quarterly measurement on an in-memory corpus.

Ingests a few dated documents, ranks them against a proposition with the
averaging filter, and bins the top matches per calendar quarter.
"""

import json

import numpy as np

from propmatch import (
    EmbeddingTable,
    PipelineConfig,
    PropositionQuery,
    Resources,
    fallback_tokenize,
    ingest_corpus,
    match,
    measure,
)
from propmatch.pipeline import measurement_to_csv

docs = [
    {"id": "d1", "date": "2011-02-10",
     "sentences": ["Taxes rise fast.", "Unrelated local news."]},
    {"id": "d2", "date": "2011-03-01", "sentences": ["Taxes rise again."]},
    {"id": "d3", "date": "2011-08-15", "sentences": ["Taxes rise slowly."]},
    {"id": "d4", "sentences": ["Sports results from the weekend."]},
]
corpus = ingest_corpus([json.dumps(d) for d in docs])

words = ["taxes", "rise", "fast", "again", "slowly", "unrelated", "local",
         "news", "sports", "results", "from", "the", "weekend"]
rng = np.random.default_rng(4)
entries = {w: rng.normal(size=8) for w in words}
# pull the on-topic words together so the similarity structure is visible
for w in ("fast", "again", "slowly"):
    entries[w] = 0.5 * (entries["taxes"] + entries["rise"]) + 0.1 * entries[w]
table = EmbeddingTable(dim=8, entries=entries)

query = PropositionQuery(id="q", text="Taxes rise.",
                         tokens=tuple(fallback_tokenize("Taxes rise.")))
config = PipelineConfig(filter="averaging", reranker="none", k=5, n=3)
matches = match(query, corpus, config, Resources(embeddings=table))

print("top matches:")
for m in matches:
    s = corpus.sentence(m.doc_id, m.position)
    print(f"  {m.final_rank}. {m.fast_score:.3f}  {m.doc_id}: {s.text}")

series = measure(matches, corpus)
print("\nquarterly counts:")
print(measurement_to_csv(series), end="")
print(f"undated matches: {series.undated_matches}")
