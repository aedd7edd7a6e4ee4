"""Retrieval evaluation and inter-rater agreement.

Shows recall@n on a tiny labeled fixture and Krippendorff's interval alpha
over 1-5 ratings from two raters.
"""

import io
import json

import numpy as np

from propmatch import AveragingScorer, EmbeddingTable, RatingRecord
from propmatch.pipeline import (
    krippendorff_alpha_interval,
    load_recall_fixture,
    recall_at_n,
)

table = EmbeddingTable(dim=2, entries={
    "a": np.array([1.0, 0.0]),
    "b": np.array([0.9, 0.1]),
    "c": np.array([0.5, 0.5]),
    "d": np.array([0.0, 1.0]),
})
scorer = AveragingScorer(table)

# the relevant sentence ("d") scores worst against the query "a", so it only
# enters the window at n = 3
fixture = json.dumps({"query": "a", "sentences": ["b", "c", "d"],
                      "relevant": [2]})
instances = load_recall_fixture(io.StringIO(fixture))
for n in (1, 2, 3):
    print(f"recall@{n} = {recall_at_n(instances, scorer, n):.2f}")

ratings = [
    RatingRecord("r1", "q", "d", 0, 1), RatingRecord("r2", "q", "d", 0, 2),
    RatingRecord("r1", "q", "d", 1, 3), RatingRecord("r2", "q", "d", 1, 3),
    RatingRecord("r1", "q", "d", 2, 4), RatingRecord("r2", "q", "d", 2, 5),
    RatingRecord("r1", "q", "d", 3, 2), RatingRecord("r2", "q", "d", 3, 4),
]
print(f"\ninterval alpha = {krippendorff_alpha_interval(ratings):.4f}")
