"""Finding an edit script between two dependency trees.

Builds two small trees by hand, runs the beam search, and prints the ops,
the 33 features, and the per-edit vectors fed to the sequence scorer.
"""

import numpy as np

from propmatch import (
    DepTree,
    EmbeddingTable,
    SearchConfig,
    TreeNode,
    extract_features,
    find_edit_sequence,
    vectorize_sequence,
)
from propmatch.treeedit import FEATURE_NAMES

# "John sells cars" as a dependency tree: the verb is the root, the subject
# hangs to its left and the object to its right
source = DepTree(TreeNode(
    "sell", "VERB", "root",
    left=(TreeNode("john", "NNP", "nsubj"),),
    right=(TreeNode("car", "NOUN", "obj"),),
))

# the target drops the subject and swaps the object's lemma
target = DepTree(TreeNode(
    "sell", "VERB", "root",
    right=(TreeNode("truck", "NOUN", "obj"),),
))

seq = find_edit_sequence(source, target, SearchConfig(beam_width=50))
print(f"found: {seq.found}, ops: {len(seq.ops)}")
for op in seq.ops:
    print(" ", op)

features = extract_features(seq, source, target)
print("\nnon-zero features:")
for name, value in zip(FEATURE_NAMES, features.values):
    if value:
        print(f"  {name} = {value}")

# per-edit vectors: kind one-hot plus an embedding-difference component
table = EmbeddingTable(dim=3, entries={
    "john": np.array([1.0, 0.0, 0.0]),
    "car": np.array([0.0, 1.0, 0.0]),
    "truck": np.array([0.0, 0.8, 0.6]),
})
print("\nedit vectors:")
for step in vectorize_sequence(seq, table):
    print(" ", np.round(step, 2))
