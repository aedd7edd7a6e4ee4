"""Shared test utilities: tree construction, random trees, and an exhaustive
breadth-first oracle for minimum edit script length.

The BFS oracle reuses the package's edit semantics (apply_edit and the
candidate generator) but searches exhaustively instead of with a beam, so it
checks the search strategy, not itself.
"""

import random

from propmatch.corpus import DepTree, TreeNode
from propmatch.treeedit import (
    _Mut,
    _apply_to_mut,
    _candidate_ops,
    annotate_uids,
    target_inventory,
)


def node(lemma, pos="NOUN", deprel="dep", left=(), right=()):
    return TreeNode(lemma, pos, deprel, tuple(left), tuple(right))


def tree(root_node):
    return DepTree(root_node)


def leaf(lemma, pos="NOUN", deprel="dep"):
    return node(lemma, pos, deprel)


def bfs_min_script_length(source, target, max_depth=8):
    """Exhaustive BFS over edit sequences; returns the minimum length, or
    None if the target is unreachable within max_depth."""
    src = annotate_uids(source)
    inventory = target_inventory(target)
    tsig = target.signature()
    if src.signature() == tsig:
        return 0
    max_nodes = max(source.size(), target.size()) + 2
    frontier = [_Mut(src)]
    visited = {src.signature()}
    for depth in range(1, max_depth + 1):
        nxt = []
        for m in frontier:
            for op in _candidate_ops(m, inventory, max_nodes):
                m2 = m.copy()
                _apply_to_mut(m2, op)
                sig, _profile = m2.sig_and_profile()
                if sig in visited:
                    continue
                visited.add(sig)
                if sig == tsig:
                    return depth
                nxt.append(m2)
        frontier = nxt
        if not frontier:
            return None
    return None


def random_tree(rng: random.Random, max_nodes=8, lemmas=None, pos_tags=None,
                deprels=None) -> DepTree:
    """A random ordered dependency tree with <= max_nodes nodes."""
    lemmas = lemmas or [f"w{i}" for i in range(10)]
    pos_tags = pos_tags or ["NOUN", "VERB", "PROPN", "NUM"]
    deprels = deprels or ["nsubj", "obj", "dep", "xcomp"]
    n = rng.randint(1, max_nodes)
    # parent of node i is a random earlier node; node 0 is the root
    children = {i: [] for i in range(n)}
    for i in range(1, n):
        children[rng.randrange(i)].append(i)

    def build(i, deprel):
        left, right = [], []
        for c in children[i]:
            sub = build(c, rng.choice(deprels))
            (left if rng.random() < 0.5 else right).append(sub)
        return TreeNode(rng.choice(lemmas), rng.choice(pos_tags), deprel,
                        tuple(left), tuple(right))

    return DepTree(build(0, "root"))


def enumerate_structures(n):
    """All ordered left/right tree structures with exactly n nodes, as nested
    (left_tuple, right_tuple) shapes."""
    if n == 1:
        return [((), ())]
    out = []
    for k_left in range(n):  # nodes in the left forest
        k_right = n - 1 - k_left
        for lf in _forests(k_left):
            for rf in _forests(k_right):
                out.append((lf, rf))
    return out


def _forests(n):
    """All ordered forests (tuples of structures) with n total nodes."""
    if n == 0:
        return [()]
    out = []
    for first_size in range(1, n + 1):
        for first in enumerate_structures(first_size):
            for rest in _forests(n - first_size):
                out.append((first,) + rest)
    return out


def label_shape(shape, lemmas, pos_tags, deprels, offset=0) -> DepTree:
    """Deterministically label a structure by cycling through the inventory
    in preorder, starting at ``offset``.  The root's deprel is "root"."""
    counter = [offset]

    def build(sh, is_root):
        i = counter[0]
        counter[0] += 1
        lemma = lemmas[i % len(lemmas)]
        pos = pos_tags[(i + offset) % len(pos_tags)]
        dep = "root" if is_root else deprels[i % len(deprels)]
        left = tuple(build(s, False) for s in sh[0])
        right = tuple(build(s, False) for s in sh[1])
        return TreeNode(lemma, pos, dep, left, right)

    return DepTree(build(shape, True))
