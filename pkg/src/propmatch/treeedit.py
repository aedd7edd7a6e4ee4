"""Tree edit scripts between dependency trees.

An edit script is an ordered list of nine operation kinds that transforms a
candidate sentence's tree into the query's tree.  Scripts are found by
depth-synchronous beam search with a lemma/POS/deprel mismatch heuristic;
from a found script we extract a 33-value integer feature vector and a
per-edit vector sequence for the neural scorer.

All edits are functional: apply_edit never mutates its input tree.  Node
identity across edits is carried by integer uids, which do not take part in
tree equality.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .corpus import DepTree, TreeNode
from .embeddings import EmbeddingTable
from .errors import IllegalEdit

KINDS = (
    "INSERT-CHILD",
    "INSERT-PARENT",
    "DELETE-LEAF",
    "DELETE-AND-MERGE",
    "RELABEL-NODE",
    "RELABEL-EDGE",
    "MOVE-SUBTREE",
    "NEW-ROOT",
    "MOVE-SIBLING",
)
KIND_INDEX = {k: i for i, k in enumerate(KINDS)}

# required argument fields per kind (beyond `node`); all others must be None
_ARITY = {
    "INSERT-CHILD": {"lemma", "pos", "edge", "side", "new_uid"},
    "INSERT-PARENT": {"lemma", "pos", "edge", "side", "new_uid"},
    "DELETE-LEAF": set(),
    "DELETE-AND-MERGE": set(),
    "RELABEL-NODE": {"lemma", "pos"},
    "RELABEL-EDGE": {"edge"},
    "MOVE-SUBTREE": {"dest", "side"},
    "NEW-ROOT": {"side"},
    "MOVE-SIBLING": {"side", "position"},
}
_ARG_FIELDS = ("lemma", "pos", "edge", "side", "position", "dest", "new_uid")

SUBJECT_LABELS = frozenset({"nsubj", "nsubjpass", "csubj", "csubjpass"})
OBJECT_LABELS = frozenset({"dobj", "obj", "iobj"})
VCOMP_LABELS = frozenset({"xcomp", "ccomp"})
ROOT_LABELS = frozenset({"root"})


def is_noun(pos: str) -> bool:
    return pos.startswith("NN") or pos == "NOUN"


def is_proper_noun(pos: str) -> bool:
    return pos.startswith("NNP") or pos == "PROPN"


def is_verb(pos: str) -> bool:
    return pos.startswith("VB") or pos == "VERB"


def is_pronoun(pos: str) -> bool:
    return pos.startswith("PRP") or pos == "PRON"


def parse_number(lemma: str) -> Optional[float]:
    try:
        return float(lemma.replace(",", ""))
    except ValueError:
        return None


def is_numeric(pos: str, lemma: str) -> bool:
    return pos in ("CD", "NUM") or parse_number(lemma) is not None


@dataclass(frozen=True)
class EditOp:
    """One tree edit.  `node` (and `dest`) reference nodes by uid."""

    kind: str
    node: int
    lemma: Optional[str] = None
    pos: Optional[str] = None
    edge: Optional[str] = None
    side: Optional[str] = None      # "left" | "right"
    position: Optional[str] = None  # "first" | "last" (MOVE-SIBLING)
    dest: Optional[int] = None
    new_uid: Optional[int] = None

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise IllegalEdit(f"unknown edit kind {self.kind!r}")
        required = _ARITY[self.kind]
        for f in _ARG_FIELDS:
            val = getattr(self, f)
            if f in required and val is None:
                raise IllegalEdit(f"{self.kind} requires argument {f!r}")
            if f not in required and val is not None:
                raise IllegalEdit(f"{self.kind} does not take argument {f!r}")
        if self.side is not None and self.side not in ("left", "right"):
            raise IllegalEdit(f"bad side {self.side!r}")
        if self.position is not None and self.position not in ("first", "last"):
            raise IllegalEdit(f"bad position {self.position!r}")


@dataclass(frozen=True)
class OpRecord:
    """Attributes of the op's node captured at application time."""

    kind: str
    old_lemma: Optional[str] = None
    old_pos: Optional[str] = None
    old_deprel: Optional[str] = None
    new_lemma: Optional[str] = None
    new_pos: Optional[str] = None
    new_deprel: Optional[str] = None


@dataclass(frozen=True)
class EditSequence:
    ops: tuple
    found: bool
    source_unedited: dict
    records: tuple = ()


@dataclass(frozen=True)
class SearchConfig:
    beam_width: int = 100
    max_expansions: int = 10000
    max_depth: Optional[int] = None  # default 2 * (|source| + |target|)

    def __post_init__(self):
        if self.beam_width < 1 or self.max_expansions < 1:
            raise ValueError("beam_width and max_expansions must be positive")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be positive")


@dataclass(frozen=True)
class TreeEditFeatures:
    values: tuple

    def __post_init__(self):
        if len(self.values) != 33:
            raise ValueError(f"expected 33 features, got {len(self.values)}")

    def as_array(self):
        return np.array(self.values, dtype=np.float64)


# ---------------------------------------------------------------------------
# tree plumbing


def annotate_uids(tree: DepTree) -> DepTree:
    """Assign uids 0..n-1 in preorder.  Both the search and feature
    extraction call this, so uids always line up for a given tree."""
    counter = itertools.count()

    def walk(n: TreeNode) -> TreeNode:
        uid = next(counter)
        return TreeNode(
            n.lemma, n.pos, n.deprel,
            tuple(walk(c) for c in n.left),
            tuple(walk(c) for c in n.right),
            uid=uid,
        )

    return DepTree(walk(tree.root))


class _Mut:
    """Mutable scratch copy of a tree, used to implement one edit."""

    def __init__(self, tree: DepTree):
        self.attrs = {}    # uid -> [lemma, pos, deprel]
        self.left = {}     # uid -> list of child uids
        self.right = {}
        self.parent = {}   # uid -> parent uid (root -> None)

        def walk(n: TreeNode, parent):
            if n.uid in self.attrs:
                raise IllegalEdit(f"duplicate uid {n.uid} in tree")
            self.attrs[n.uid] = [n.lemma, n.pos, n.deprel]
            self.left[n.uid] = [c.uid for c in n.left]
            self.right[n.uid] = [c.uid for c in n.right]
            self.parent[n.uid] = parent
            for c in n.children():
                walk(c, n.uid)

        walk(tree.root, None)
        self.root = tree.root.uid

    def require(self, uid):
        if uid not in self.attrs:
            raise IllegalEdit(f"no node with uid {uid}")

    def sides(self, uid):
        return {"left": self.left[uid], "right": self.right[uid]}

    def locate(self, uid):
        """(side, index) of uid within its parent's child lists."""
        p = self.parent[uid]
        for side, lst in self.sides(p).items():
            if uid in lst:
                return side, lst.index(uid)
        raise IllegalEdit(f"node {uid} not found under its parent")

    def detach(self, uid):
        side, idx = self.locate(uid)
        self.sides(self.parent[uid])[side].pop(idx)
        self.parent[uid] = None

    def insert_last(self, parent_uid, side, uid):
        # "last" means farthest from the parent: index 0 of the left list,
        # end of the right list (children are ordered by token index).
        lst = self.sides(parent_uid)[side]
        if side == "left":
            lst.insert(0, uid)
        else:
            lst.append(uid)
        self.parent[uid] = parent_uid

    def insert_first(self, parent_uid, side, uid):
        # "first" means nearest to the parent.
        lst = self.sides(parent_uid)[side]
        if side == "left":
            lst.append(uid)
        else:
            lst.insert(0, uid)
        self.parent[uid] = parent_uid

    def insert_at(self, parent_uid, side, idx, uid):
        self.sides(parent_uid)[side].insert(idx, uid)
        self.parent[uid] = parent_uid

    def is_descendant(self, uid, ancestor) -> bool:
        while uid is not None:
            if uid == ancestor:
                return True
            uid = self.parent[uid]
        return False

    def new_node(self, uid, lemma, pos, deprel):
        if uid in self.attrs:
            raise IllegalEdit(f"uid {uid} already present")
        self.attrs[uid] = [lemma, pos, deprel]
        self.left[uid] = []
        self.right[uid] = []
        self.parent[uid] = None

    def drop(self, uid):
        del self.attrs[uid], self.left[uid], self.right[uid], self.parent[uid]

    def copy(self) -> "_Mut":
        m = _Mut.__new__(_Mut)
        m.attrs = {k: v[:] for k, v in self.attrs.items()}
        m.left = {k: v[:] for k, v in self.left.items()}
        m.right = {k: v[:] for k, v in self.right.items()}
        m.parent = dict(self.parent)
        m.root = self.root
        return m

    def preorder(self):
        """(uid, parent_uid) pairs, node before its children."""
        out = []
        stack = [(self.root, None)]
        while stack:
            uid, parent = stack.pop()
            out.append((uid, parent))
            kids = self.left[uid] + self.right[uid]
            for c in reversed(kids):
                stack.append((c, uid))
        return out

    def sig_and_profile(self):
        """One pass computing the canonical signature plus the label and
        attachment multisets used by the search heuristic."""
        lemmas = Counter()
        pos = Counter()
        deps = Counter()
        attach = Counter()

        def walk(uid, parent_lemma, side):
            lemma, p, dep = self.attrs[uid]
            lemmas[lemma] += 1
            pos[p] += 1
            deps[dep] += 1
            attach[(parent_lemma, side, lemma)] += 1
            return (
                lemma, p, dep,
                tuple(walk(c, lemma, "left") for c in self.left[uid]),
                tuple(walk(c, lemma, "right") for c in self.right[uid]),
            )

        sig = walk(self.root, None, None)
        return sig, (lemmas, pos, deps, attach)

    def to_tree(self) -> DepTree:
        def build(uid) -> TreeNode:
            lemma, pos, deprel = self.attrs[uid]
            return TreeNode(
                lemma, pos, deprel,
                tuple(build(c) for c in self.left[uid]),
                tuple(build(c) for c in self.right[uid]),
                uid=uid,
            )

        return DepTree(build(self.root))


def apply_edit(tree: DepTree, op: EditOp) -> DepTree:
    """Apply one edit, returning a new tree; the input is untouched."""
    m = _Mut(tree)
    _apply_to_mut(m, op)
    return m.to_tree()


def _apply_to_mut(m: _Mut, op: EditOp) -> None:
    n = op.node
    m.require(n)
    kind = op.kind

    if kind == "INSERT-CHILD":
        m.new_node(op.new_uid, op.lemma, op.pos, op.edge)
        m.insert_last(n, op.side, op.new_uid)

    elif kind == "INSERT-PARENT":
        if n == m.root:
            raise IllegalEdit("INSERT-PARENT requires a non-root node")
        side, idx = m.locate(n)
        old_parent = m.parent[n]
        m.detach(n)
        m.new_node(op.new_uid, op.lemma, op.pos, op.edge)
        m.insert_at(old_parent, side, idx, op.new_uid)
        # n keeps its own deprel under the new node
        m.insert_last(op.new_uid, op.side, n)

    elif kind == "DELETE-LEAF":
        if m.left[n] or m.right[n]:
            raise IllegalEdit("DELETE-LEAF target is not a leaf")
        if n == m.root:
            raise IllegalEdit("cannot delete the root")
        m.detach(n)
        m.drop(n)

    elif kind == "DELETE-AND-MERGE":
        kids = m.left[n] + m.right[n]
        if len(kids) != 1:
            raise IllegalEdit("DELETE-AND-MERGE target must have exactly one child")
        if n == m.root:
            raise IllegalEdit("cannot delete-and-merge the root")
        child = kids[0]
        side, idx = m.locate(n)
        parent = m.parent[n]
        m.detach(n)
        # detach child from n; it takes n's former slot and keeps its deprel
        for lst in (m.left[n], m.right[n]):
            if child in lst:
                lst.remove(child)
        m.insert_at(parent, side, idx, child)
        m.drop(n)

    elif kind == "RELABEL-NODE":
        m.attrs[n][0] = op.lemma
        m.attrs[n][1] = op.pos

    elif kind == "RELABEL-EDGE":
        m.attrs[n][2] = op.edge

    elif kind == "MOVE-SUBTREE":
        m.require(op.dest)
        if n == m.root:
            raise IllegalEdit("cannot move the root")
        if m.is_descendant(op.dest, n):
            raise IllegalEdit("MOVE-SUBTREE destination is inside the moved subtree")
        m.detach(n)
        m.insert_last(op.dest, op.side, n)

    elif kind == "NEW-ROOT":
        if n == m.root:
            raise IllegalEdit("NEW-ROOT target is already the root")
        old_root = m.root
        m.detach(n)
        m.attrs[n][2] = "root"
        # the demoted former root keeps its "root" deprel until relabeled
        m.insert_last(n, op.side, old_root)
        m.parent[n] = None
        m.root = n

    elif kind == "MOVE-SIBLING":
        if n == m.root:
            raise IllegalEdit("cannot move the root among siblings")
        parent = m.parent[n]
        m.detach(n)
        if op.position == "first":
            m.insert_first(parent, op.side, n)
        else:
            m.insert_last(parent, op.side, n)

    else:  # pragma: no cover - guarded by EditOp.__post_init__
        raise IllegalEdit(f"unknown kind {kind}")


def trees_equal(a: DepTree, b: DepTree) -> bool:
    """Recursive equality on lemma, POS, incoming deprel, and ordered
    left/right child lists.  Uids are ignored."""
    return a.signature() == b.signature()


def replay(source: DepTree, ops) -> tuple[list[OpRecord], DepTree]:
    """Apply ops in order, capturing each op's node attributes beforehand."""
    tree = source
    records = []
    for op in ops:
        m = _Mut(tree)
        m.require(op.node)
        old_lemma, old_pos, old_deprel = m.attrs[op.node]
        kind = op.kind
        if kind in ("INSERT-CHILD", "INSERT-PARENT"):
            rec = OpRecord(kind, new_lemma=op.lemma, new_pos=op.pos, new_deprel=op.edge)
        elif kind == "RELABEL-NODE":
            rec = OpRecord(kind, old_lemma, old_pos, old_deprel,
                           new_lemma=op.lemma, new_pos=op.pos, new_deprel=old_deprel)
        elif kind == "RELABEL-EDGE":
            rec = OpRecord(kind, old_lemma, old_pos, old_deprel,
                           new_lemma=old_lemma, new_pos=old_pos, new_deprel=op.edge)
        else:
            rec = OpRecord(kind, old_lemma, old_pos, old_deprel)
        records.append(rec)
        tree = apply_edit(tree, op)
    return records, tree


def _unedited_counts(source: DepTree, touched: set) -> dict:
    counts = {"total": 0, "numeric": 0, "verbs": 0, "nouns": 0, "proper": 0}
    for n in source.nodes():
        if n.uid in touched:
            continue
        counts["total"] += 1
        if is_numeric(n.pos, n.lemma):
            counts["numeric"] += 1
        if is_verb(n.pos):
            counts["verbs"] += 1
        if is_noun(n.pos):
            counts["nouns"] += 1
        if is_proper_noun(n.pos):
            counts["proper"] += 1
    return counts


def _touched_uids(ops) -> set:
    touched = set()
    for op in ops:
        touched.add(op.node)
        if op.dest is not None:
            touched.add(op.dest)
    return touched


# ---------------------------------------------------------------------------
# beam search


def _counter_diff(a: Counter, b: Counter) -> int:
    """Size of the symmetric multiset difference."""
    d = 0
    for k, v in a.items():
        w = b.get(k, 0)
        if v > w:
            d += v - w
    for k, v in b.items():
        w = a.get(k, 0)
        if v > w:
            d += v - w
    return d


def _heuristic(profile, root_lemma, target_profile, target_root_lemma):
    """Primary: lemma multiset mismatch plus a root-lemma flag.  Secondary
    tie-breaker: POS, deprel, and (parent lemma, side, lemma) attachment
    mismatches."""
    lemmas, pos, deps, attach = profile
    t_lem, t_pos, t_dep, t_att = target_profile
    primary = _counter_diff(lemmas, t_lem) + (1 if root_lemma != target_root_lemma else 0)
    secondary = (
        _counter_diff(pos, t_pos)
        + _counter_diff(deps, t_dep)
        + _counter_diff(attach, t_att)
    )
    return primary, secondary


def _candidate_ops(m: _Mut, inventory, max_nodes):
    """All applicable edits with arguments drawn from the target inventory,
    in a fixed deterministic order.

    Inserts are restricted to (lemma, pos, edge) triples that occur in the
    target: a minimal script only ever needs to insert nodes with their
    final labels, so the full pairs-times-edges cross product adds branching
    without shortening any script.
    """
    triples, pairs, edges = inventory
    info = m.preorder()
    root_uid = m.root
    size = len(info)
    next_uid = max(uid for uid, _ in info) + 1
    in_subtree = m.is_descendant

    ops = []
    if size < max_nodes:
        for uid, _p in info:
            for lemma, pos, edge in triples:
                for side in ("left", "right"):
                    ops.append(EditOp("INSERT-CHILD", uid, lemma=lemma, pos=pos,
                                      edge=edge, side=side, new_uid=next_uid))
        for uid, _p in info:
            if uid == root_uid:
                continue
            for lemma, pos, edge in triples:
                for side in ("left", "right"):
                    ops.append(EditOp("INSERT-PARENT", uid, lemma=lemma, pos=pos,
                                      edge=edge, side=side, new_uid=next_uid))
    for uid, _p in info:
        if uid != root_uid and not m.left[uid] and not m.right[uid]:
            ops.append(EditOp("DELETE-LEAF", uid))
    for uid, _p in info:
        if uid != root_uid and len(m.left[uid]) + len(m.right[uid]) == 1:
            ops.append(EditOp("DELETE-AND-MERGE", uid))
    for uid, _p in info:
        lemma0, pos0, _dep0 = m.attrs[uid]
        for lemma, pos in pairs:
            if (lemma, pos) != (lemma0, pos0):
                ops.append(EditOp("RELABEL-NODE", uid, lemma=lemma, pos=pos))
    for uid, _p in info:
        dep0 = m.attrs[uid][2]
        for edge in edges:
            if edge != dep0:
                ops.append(EditOp("RELABEL-EDGE", uid, edge=edge))
    for uid, _p in info:
        if uid == root_uid:
            continue
        for dest, _pp in info:
            if dest == uid or in_subtree(dest, uid):
                continue
            for side in ("left", "right"):
                ops.append(EditOp("MOVE-SUBTREE", uid, dest=dest, side=side))
    for uid, _p in info:
        if uid == root_uid:
            continue
        for side in ("left", "right"):
            ops.append(EditOp("NEW-ROOT", uid, side=side))
    for uid, _p in info:
        if uid == root_uid:
            continue
        for side in ("left", "right"):
            for position in ("first", "last"):
                ops.append(EditOp("MOVE-SIBLING", uid, side=side, position=position))
    return ops


def target_inventory(target: DepTree):
    """(lemma, pos, edge) triples, (lemma, pos) pairs, and edge labels
    occurring in the target, in deterministic preorder-first-seen order."""
    triples, pairs, edges = [], [], []
    seen_t, seen_p, seen_e = set(), set(), set()
    for n in target.nodes():
        if (n.lemma, n.pos, n.deprel) not in seen_t:
            seen_t.add((n.lemma, n.pos, n.deprel))
            triples.append((n.lemma, n.pos, n.deprel))
        if (n.lemma, n.pos) not in seen_p:
            seen_p.add((n.lemma, n.pos))
            pairs.append((n.lemma, n.pos))
        if n.deprel not in seen_e:
            seen_e.add(n.deprel)
            edges.append(n.deprel)
    return triples, pairs, edges


def _delta_candidates(m: _Mut, profile, root_lemma, target_profile,
                      target_root_lemma, inventory, max_nodes):
    """Every applicable edit paired with its exact effect on the heuristic,
    computed from counter arithmetic alone.

    Returns (dP, dS, opspec) tuples in a fixed deterministic order, where
    opspec is the argument tuple an EditOp would be built from.  No trees
    are copied or mutated here; that is what makes the beam search cheap
    enough to run inside the matching pipeline.
    """
    triples, pairs, edges = inventory
    L, P, D, A = profile
    tL, tP, tD, tA = target_profile
    attrs = m.attrs
    left, right = m.left, m.right
    root_uid = m.root

    def incL(k):
        return 1 if L[k] >= tL[k] else -1

    def decL(k):
        return 1 if L[k] <= tL[k] else -1

    def incP(k):
        return 1 if P[k] >= tP[k] else -1

    def incD(k):
        return 1 if D[k] >= tD[k] else -1

    def decP(k):
        return 1 if P[k] <= tP[k] else -1

    def decD(k):
        return 1 if D[k] <= tD[k] else -1

    def attA(changes):
        # sequential symmetric-difference delta; repeated keys need the
        # running adjustment to stay exact
        adj = {}
        d = 0
        for k, s in changes:
            cur = A[k] + adj.get(k, 0)
            if s > 0:
                d += 1 if cur >= tA[k] else -1
            else:
                d += 1 if cur <= tA[k] else -1
            adj[k] = adj.get(k, 0) + s
        return d

    # preorder with parent and side, plus subtree sets for the move guard
    info = []
    stack = [(root_uid, None, None)]
    while stack:
        uid, parent, side = stack.pop()
        info.append((uid, parent, side))
        for c in reversed(right[uid]):
            stack.append((c, uid, "right"))
        for c in reversed(left[uid]):
            stack.append((c, uid, "left"))
    subtree = {}
    for uid, _parent, _side in reversed(info):
        s = {uid}
        for c in left[uid] + right[uid]:
            s |= subtree[c]
        subtree[uid] = s

    size = len(info)
    out = []

    if size < max_nodes:
        for uid, _parent, _nside in info:
            p_lem = attrs[uid][0]
            for l, ps, e in triples:
                dP = incL(l)
                base = incP(ps) + incD(e)
                for side in ("left", "right"):
                    dS = base + (1 if A[(p_lem, side, l)] >= tA[(p_lem, side, l)] else -1)
                    out.append((dP, dS, ("INSERT-CHILD", uid, l, ps, e, side)))
        for uid, parent, nside in info:
            if uid == root_uid:
                continue
            n_lem = attrs[uid][0]
            g_lem = attrs[parent][0]
            for l, ps, e in triples:
                dP = incL(l)
                base = incP(ps) + incD(e)
                for side in ("left", "right"):
                    dS = base + attA([((g_lem, nside, n_lem), -1),
                                      ((l, side, n_lem), 1),
                                      ((g_lem, nside, l), 1)])
                    out.append((dP, dS, ("INSERT-PARENT", uid, l, ps, e, side)))

    for uid, parent, nside in info:
        if uid != root_uid and not left[uid] and not right[uid]:
            lem, pos, dep = attrs[uid]
            dP = decL(lem)
            k = (attrs[parent][0], nside, lem)
            dS = decP(pos) + decD(dep) + (1 if A[k] <= tA[k] else -1)
            out.append((dP, dS, ("DELETE-LEAF", uid)))

    for uid, parent, nside in info:
        if uid == root_uid:
            continue
        kids = left[uid] + right[uid]
        if len(kids) != 1:
            continue
        c = kids[0]
        c_side = "left" if left[uid] else "right"
        lem, pos, dep = attrs[uid]
        p_lem = attrs[parent][0]
        c_lem = attrs[c][0]
        dP = decL(lem)
        dS = decP(pos) + decD(dep) + attA([((p_lem, nside, lem), -1),
                                           ((lem, c_side, c_lem), -1),
                                           ((p_lem, nside, c_lem), 1)])
        out.append((dP, dS, ("DELETE-AND-MERGE", uid)))

    for uid, parent, nside in info:
        lem, pos, _dep = attrs[uid]
        p_lem = attrs[parent][0] if parent is not None else None
        for l, ps in pairs:
            if (l, ps) == (lem, pos):
                continue
            dP = 0 if l == lem else decL(lem) + incL(l)
            if uid == root_uid:
                dP += (1 if l != target_root_lemma else 0) - \
                      (1 if root_lemma != target_root_lemma else 0)
            dS = 0 if ps == pos else decP(pos) + incP(ps)
            if l != lem:
                changes = [((p_lem, nside, lem), -1), ((p_lem, nside, l), 1)]
                for cs, lst in (("left", left[uid]), ("right", right[uid])):
                    for c in lst:
                        cl = attrs[c][0]
                        changes.append(((lem, cs, cl), -1))
                        changes.append(((l, cs, cl), 1))
                dS += attA(changes)
            out.append((dP, dS, ("RELABEL-NODE", uid, l, ps)))

    for uid, _parent, _nside in info:
        dep = attrs[uid][2]
        for e in edges:
            if e != dep:
                out.append((0, decD(dep) + incD(e), ("RELABEL-EDGE", uid, e)))

    for uid, parent, nside in info:
        if uid == root_uid:
            continue
        lem = attrs[uid][0]
        p_lem = attrs[parent][0]
        sub = subtree[uid]
        for dest, _dp, _ds in info:
            if dest in sub:
                continue
            d_lem = attrs[dest][0]
            for side in ("left", "right"):
                dS = attA([((p_lem, nside, lem), -1), ((d_lem, side, lem), 1)])
                out.append((0, dS, ("MOVE-SUBTREE", uid, dest, side)))

    r_lem = root_lemma
    for uid, parent, nside in info:
        if uid == root_uid:
            continue
        lem, _pos, dep = attrs[uid]
        p_lem = attrs[parent][0]
        ddep = 0 if dep == "root" else decD(dep) + incD("root")
        dP = (1 if lem != target_root_lemma else 0) - \
             (1 if r_lem != target_root_lemma else 0)
        for side in ("left", "right"):
            dS = ddep + attA([((p_lem, nside, lem), -1),
                              ((None, None, lem), 1),
                              ((None, None, r_lem), -1),
                              ((lem, side, r_lem), 1)])
            out.append((dP, dS, ("NEW-ROOT", uid, side)))

    for uid, parent, nside in info:
        if uid == root_uid:
            continue
        lem = attrs[uid][0]
        p_lem = attrs[parent][0]
        for side in ("left", "right"):
            if side == nside:
                dS = 0
            else:
                dS = attA([((p_lem, nside, lem), -1), ((p_lem, side, lem), 1)])
            for position in ("first", "last"):
                out.append((0, dS, ("MOVE-SIBLING", uid, side, position)))

    return out


def _make_op(spec, new_uid) -> EditOp:
    kind = spec[0]
    if kind in ("INSERT-CHILD", "INSERT-PARENT"):
        _k, uid, lemma, pos, edge, side = spec
        return EditOp(kind, uid, lemma=lemma, pos=pos, edge=edge, side=side,
                      new_uid=new_uid)
    if kind in ("DELETE-LEAF", "DELETE-AND-MERGE"):
        return EditOp(kind, spec[1])
    if kind == "RELABEL-NODE":
        return EditOp(kind, spec[1], lemma=spec[2], pos=spec[3])
    if kind == "RELABEL-EDGE":
        return EditOp(kind, spec[1], edge=spec[2])
    if kind == "MOVE-SUBTREE":
        return EditOp(kind, spec[1], dest=spec[2], side=spec[3])
    if kind == "NEW-ROOT":
        return EditOp(kind, spec[1], side=spec[2])
    return EditOp("MOVE-SIBLING", spec[1], side=spec[2], position=spec[3])


def find_edit_sequence(source: DepTree, target: DepTree,
                       config: SearchConfig = SearchConfig()) -> EditSequence:
    """Beam-search for an edit script turning `source` into `target`.

    Depth-synchronous: each round scores every applicable edit of every
    surviving state by ops-so-far + heuristic (using exact counter deltas,
    so candidates are ranked without building their trees), then applies
    only the winning edits, pruning duplicates by canonical tree signature.
    Returns found=False (with empty ops) when the expansion or depth budget
    runs out; downstream feature extraction treats that as a signal, not an
    error.
    """
    src = annotate_uids(source)
    target_sig = target.signature()
    inventory = target_inventory(target)
    _t_sig, target_profile = _Mut(annotate_uids(target)).sig_and_profile()
    target_root_lemma = target.root.lemma
    max_depth = config.max_depth
    if max_depth is None:
        max_depth = 2 * (source.size() + target.size())
    # temporary growth allowance; scripts may overshoot the target size by a
    # little (e.g. INSERT-PARENT before a delete) but unbounded growth only
    # slows the search down
    max_nodes = max(source.size(), target.size()) + 2

    def finish(ops):
        records, final = replay(src, ops)
        assert final.signature() == target_sig
        return EditSequence(
            ops=tuple(ops), found=True,
            source_unedited=_unedited_counts(src, _touched_uids(ops)),
            records=tuple(records),
        )

    if src.signature() == target_sig:
        return finish(())

    not_found = EditSequence(
        ops=(), found=False,
        source_unedited=_unedited_counts(src, set()), records=(),
    )

    m0 = _Mut(src)
    sig0, prof0 = m0.sig_and_profile()
    hp0, hs0 = _heuristic(prof0, src.root.lemma, target_profile,
                          target_root_lemma)
    max_uid0 = max(uid for uid, _ in m0.preorder())
    # state: (mut, ops, profile, hp, hs, root_lemma, max_uid)
    beam = [(m0, (), prof0, hp0, hs0, src.root.lemma, max_uid0)]
    visited = {sig0}
    expansions = 0
    width = config.beam_width
    for _depth in range(max_depth):
        candidates = []
        order = itertools.count()
        for state in beam:
            expansions += 1
            if expansions > config.max_expansions:
                return not_found
            mut, ops, prof, hp, hs, root_lemma, _max_uid = state
            depth_cost = len(ops) + 1
            for dP, dS, spec in _delta_candidates(
                    mut, prof, root_lemma, target_profile, target_root_lemma,
                    inventory, max_nodes):
                nhp = hp + dP
                nhs = hs + dS
                candidates.append(
                    (depth_cost + nhp, nhs, next(order), state, spec)
                )
        if not candidates:
            return not_found
        candidates.sort(key=lambda c: (c[0], c[1], c[2]))
        next_beam = []
        for f, nhs, _i, state, spec in candidates:
            # exact-profile candidates are the only possible goals; keep
            # checking them even once the beam is full
            suspect = f == len(state[1]) + 1 and nhs == 0
            if len(next_beam) >= width and not suspect:
                break
            mut, ops, _prof, _hp, _hs, _root_lemma, max_uid = state
            new_uid = max_uid + 1
            op = _make_op(spec, new_uid)
            new_mut = mut.copy()
            _apply_to_mut(new_mut, op)
            sig, prof = new_mut.sig_and_profile()
            if sig in visited:
                continue
            visited.add(sig)
            new_ops = ops + (op,)
            if sig == target_sig:
                return finish(new_ops)
            if len(next_beam) >= width:
                continue
            # recompute from the fresh profile so rounding of the ranking
            # deltas can never accumulate across depths
            hp, hs = _heuristic(prof, new_mut.attrs[new_mut.root][0],
                                target_profile, target_root_lemma)
            new_max = new_uid if spec[0] in ("INSERT-CHILD", "INSERT-PARENT") else max_uid
            next_beam.append((new_mut, new_ops, prof, hp, hs,
                              new_mut.attrs[new_mut.root][0], new_max))
        if not next_beam:
            return not_found
        beam = next_beam
    return not_found


# ---------------------------------------------------------------------------
# features

FEATURE_NAMES = (
    ["sequence_length"]
    + [f"count_{k}" for k in KINDS]
    + ["inserts_noun_or_verb", "inserts_proper_noun",
       "deletes_noun_or_verb", "deletes_proper_noun",
       "deletes_subject_edge", "deletes_object_edge",
       "deletes_vcomp_edge", "deletes_root_edge",
       "relabel_node_preserves_pos", "relabel_node_preserves_lemma",
       "relabel_node_noun_pronoun", "relabel_node_proper_noun",
       "relabel_node_numeric_gt_5pct",
       "relabel_edge_subject", "relabel_edge_object",
       "relabel_edge_vcomp", "relabel_edge_root",
       "unedited_total", "unedited_numeric", "unedited_verbs",
       "unedited_nouns", "unedited_proper_nouns",
       "sequence_found"]
)
assert len(FEATURE_NAMES) == 33

_NUMERIC_EPS = 1e-9


def _numeric_change_exceeds(old_lemma, new_lemma, threshold=0.05) -> bool:
    if old_lemma == new_lemma:
        return False
    old_v, new_v = parse_number(old_lemma), parse_number(new_lemma)
    if old_v is None or new_v is None:
        # non-parseable numerics compare unequal and count as changed
        return True
    return abs(new_v - old_v) / max(abs(old_v), _NUMERIC_EPS) > threshold


def extract_features(seq: EditSequence, source: DepTree, target: DepTree) -> TreeEditFeatures:
    """The 33 integer features of an edit sequence, in FEATURE_NAMES order.

    The sequence is replayed against `source` so captured attributes never
    depend on what the search happened to store.  When no script was found,
    features 1-27 are zero, the unedited counts cover the whole source tree,
    and the found flag is 0.
    """
    src = annotate_uids(source)
    if not seq.found:
        un = _unedited_counts(src, set())
        vals = [0] * 27 + [un["total"], un["numeric"], un["verbs"],
                           un["nouns"], un["proper"], 0]
        return TreeEditFeatures(tuple(vals))

    records, final = replay(src, seq.ops)
    if not trees_equal(final, target):
        raise IllegalEdit("edit sequence does not transform source into target")

    counts = Counter(r.kind for r in records)
    ins_nv = ins_prop = 0
    del_nv = del_prop = del_subj = del_obj = del_vc = del_root = 0
    rn_pos = rn_lemma = rn_np = rn_prop = rn_num = 0
    re_subj = re_obj = re_vc = re_root = 0
    for r in records:
        if r.kind in ("INSERT-CHILD", "INSERT-PARENT"):
            if is_noun(r.new_pos) or is_verb(r.new_pos):
                ins_nv += 1
            if is_proper_noun(r.new_pos):
                ins_prop += 1
        elif r.kind in ("DELETE-LEAF", "DELETE-AND-MERGE"):
            if is_noun(r.old_pos) or is_verb(r.old_pos):
                del_nv += 1
            if is_proper_noun(r.old_pos):
                del_prop += 1
            if r.old_deprel in SUBJECT_LABELS:
                del_subj += 1
            if r.old_deprel in OBJECT_LABELS:
                del_obj += 1
            if r.old_deprel in VCOMP_LABELS:
                del_vc += 1
            if r.old_deprel in ROOT_LABELS:
                del_root += 1
        elif r.kind == "RELABEL-NODE":
            if r.new_pos == r.old_pos:
                rn_pos += 1
            if r.new_lemma == r.old_lemma:
                rn_lemma += 1
            if (is_noun(r.old_pos) and is_pronoun(r.new_pos)) or (
                is_pronoun(r.old_pos) and is_noun(r.new_pos)
            ):
                rn_np += 1
            if is_proper_noun(r.old_pos) or is_proper_noun(r.new_pos):
                rn_prop += 1
            if (is_numeric(r.old_pos, r.old_lemma) or is_numeric(r.new_pos, r.new_lemma)) \
                    and _numeric_change_exceeds(r.old_lemma, r.new_lemma):
                rn_num += 1
        elif r.kind == "RELABEL-EDGE":
            for labels, bump in ((SUBJECT_LABELS, "s"), (OBJECT_LABELS, "o"),
                                 (VCOMP_LABELS, "v"), (ROOT_LABELS, "r")):
                if r.old_deprel in labels or r.new_deprel in labels:
                    if bump == "s":
                        re_subj += 1
                    elif bump == "o":
                        re_obj += 1
                    elif bump == "v":
                        re_vc += 1
                    else:
                        re_root += 1

    un = _unedited_counts(src, _touched_uids(seq.ops))
    vals = (
        [len(seq.ops)]
        + [counts.get(k, 0) for k in KINDS]
        + [ins_nv, ins_prop,
           del_nv, del_prop, del_subj, del_obj, del_vc, del_root,
           rn_pos, rn_lemma, rn_np, rn_prop, rn_num,
           re_subj, re_obj, re_vc, re_root,
           un["total"], un["numeric"], un["verbs"], un["nouns"], un["proper"],
           1]
    )
    return TreeEditFeatures(tuple(vals))


# ---------------------------------------------------------------------------
# vectorization for the sequence scorer


def vectorize_sequence(seq: EditSequence, table: EmbeddingTable) -> list:
    """Per-edit vectors: one-hot over the nine kinds, concatenated with an
    embedding-difference component.

    Inserts contribute the inserted lemma's embedding; node relabels
    contribute emb(new) - emb(old); deletes the negated embedding of the
    removed lemma; everything else a zero vector.  An empty sequence yields a
    single all-zero begin vector so the scorer always sees one step.
    """
    d = table.dim

    def emb(lemma):
        if lemma is None:
            return np.zeros(d)
        v = table.lookup(lemma)
        return np.zeros(d) if v is None else v

    if not seq.ops:
        return [np.zeros(len(KINDS) + d)]

    steps = []
    records = seq.records
    if len(records) != len(seq.ops):
        raise IllegalEdit("edit sequence is missing replay records")
    for op, rec in zip(seq.ops, records):
        onehot = np.zeros(len(KINDS))
        onehot[KIND_INDEX[op.kind]] = 1.0
        if op.kind in ("INSERT-CHILD", "INSERT-PARENT"):
            delta = emb(op.lemma)
        elif op.kind == "RELABEL-NODE":
            delta = emb(op.lemma) - emb(rec.old_lemma)
        elif op.kind in ("DELETE-LEAF", "DELETE-AND-MERGE"):
            delta = -emb(rec.old_lemma)
        else:
            delta = np.zeros(d)
        steps.append(np.concatenate([onehot, delta]))
    return steps


# ---------------------------------------------------------------------------
# serialization


def sequence_to_json(seq: EditSequence) -> str:
    def op_dict(op: EditOp):
        return {f: getattr(op, f) for f in ("kind", "node") + _ARG_FIELDS
                if getattr(op, f) is not None}

    return json.dumps(
        {
            "format_version": 1,
            "found": seq.found,
            "ops": [op_dict(op) for op in seq.ops],
            "source_unedited": seq.source_unedited,
            "records": [
                {k: v for k, v in vars(r).items() if v is not None}
                for r in seq.records
            ],
        }
    )


def sequence_from_json(text: str) -> EditSequence:
    obj = json.loads(text)
    return EditSequence(
        ops=tuple(EditOp(**o) for o in obj["ops"]),
        found=obj["found"],
        source_unedited=obj["source_unedited"],
        records=tuple(OpRecord(**r) for r in obj["records"]),
    )
