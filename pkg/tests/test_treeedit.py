import random

import pytest

from propmatch.corpus import DepTree, TreeNode
from propmatch.errors import IllegalEdit
from propmatch.treeedit import (
    EditOp,
    SearchConfig,
    annotate_uids,
    apply_edit,
    find_edit_sequence,
    replay,
    sequence_from_json,
    sequence_to_json,
    trees_equal,
)

from helpers import bfs_min_script_length, leaf, node, random_tree, tree


def uid_of(t: DepTree, lemma: str) -> int:
    for n in t.nodes():
        if n.lemma == lemma:
            return n.uid
    raise AssertionError(f"no node with lemma {lemma!r}")


def one_node():
    return annotate_uids(tree(node("run", "VERB", "root")))


def two_node():
    # "dog <- barks"
    return annotate_uids(
        tree(node("bark", "VERB", "root", left=[leaf("dog", "NOUN", "nsubj")]))
    )


# --- apply_edit semantics ---------------------------------------------------


def test_relabel_node_on_root():
    t = one_node()
    out = apply_edit(t, EditOp("RELABEL-NODE", t.root.uid, lemma="walk", pos="VERB"))
    assert (out.root.lemma, out.root.pos) == ("walk", "VERB")
    assert t.root.lemma == "run"  # input untouched


def test_delete_leaf_only_child():
    t = two_node()
    out = apply_edit(t, EditOp("DELETE-LEAF", uid_of(t, "dog")))
    assert out.size() == 1 and out.root.lemma == "bark"


def test_delete_leaf_on_non_leaf_raises():
    t = two_node()
    with pytest.raises(IllegalEdit):
        apply_edit(t, EditOp("DELETE-LEAF", t.root.uid))


def test_new_root_on_two_node_tree():
    # promoting the child makes it root; former root becomes its last child
    # on the requested side, keeping the "root" label
    t = two_node()
    out = apply_edit(t, EditOp("NEW-ROOT", uid_of(t, "dog"), side="left"))
    assert out.root.lemma == "dog"
    assert out.root.deprel == "root"
    assert [c.lemma for c in out.root.left] == ["bark"]
    assert out.root.left[0].deprel == "root"


def test_new_root_targeting_root_raises():
    t = two_node()
    with pytest.raises(IllegalEdit):
        apply_edit(t, EditOp("NEW-ROOT", t.root.uid, side="left"))


def test_insert_child_last_means_farthest():
    t = two_node()
    out = apply_edit(
        t,
        EditOp("INSERT-CHILD", t.root.uid, lemma="big", pos="ADJ", edge="amod",
               side="left", new_uid=99),
    )
    # new left child goes farthest from the parent: before "dog"
    assert [c.lemma for c in out.root.left] == ["big", "dog"]
    out2 = apply_edit(
        t,
        EditOp("INSERT-CHILD", t.root.uid, lemma="loud", pos="ADV", edge="advmod",
               side="right", new_uid=99),
    )
    assert [c.lemma for c in out2.root.right] == ["loud"]


def test_insert_parent_keeps_child_deprel():
    t = two_node()
    out = apply_edit(
        t,
        EditOp("INSERT-PARENT", uid_of(t, "dog"), lemma="the", pos="DET",
               edge="det", side="right", new_uid=50),
    )
    new_parent = out.root.left[0]
    assert (new_parent.lemma, new_parent.deprel) == ("the", "det")
    assert [c.lemma for c in new_parent.right] == ["dog"]
    assert new_parent.right[0].deprel == "nsubj"


def test_insert_parent_on_root_raises():
    t = one_node()
    with pytest.raises(IllegalEdit):
        apply_edit(t, EditOp("INSERT-PARENT", t.root.uid, lemma="x", pos="X",
                             edge="dep", side="left", new_uid=9))


def test_delete_and_merge():
    # bark -> dog -> the ; merging out "dog" lifts "the" into its slot
    t = annotate_uids(
        tree(node("bark", "VERB", "root",
                  left=[node("dog", "NOUN", "nsubj", left=[leaf("the", "DET", "det")])]))
    )
    out = apply_edit(t, EditOp("DELETE-AND-MERGE", uid_of(t, "dog")))
    assert [c.lemma for c in out.root.left] == ["the"]
    assert out.root.left[0].deprel == "det"


def test_delete_and_merge_requires_exactly_one_child():
    t = two_node()
    with pytest.raises(IllegalEdit):
        apply_edit(t, EditOp("DELETE-AND-MERGE", uid_of(t, "dog")))


def test_move_subtree_and_descendant_guard():
    t = annotate_uids(
        tree(node("a", "X", "root",
                  left=[node("b", "X", "dep", left=[leaf("c", "X", "dep")])],
                  right=[leaf("d", "X", "dep")]))
    )
    out = apply_edit(t, EditOp("MOVE-SUBTREE", uid_of(t, "d"),
                               dest=uid_of(t, "c"), side="right"))
    c_node = out.root.left[0].left[0]
    assert [x.lemma for x in c_node.right] == ["d"]
    with pytest.raises(IllegalEdit):
        apply_edit(t, EditOp("MOVE-SUBTREE", uid_of(t, "b"),
                             dest=uid_of(t, "c"), side="left"))


def test_move_sibling_first_vs_last():
    t = annotate_uids(
        tree(node("v", "VERB", "root",
                  left=[leaf("a", "X", "dep"), leaf("b", "X", "dep")]))
    )
    # "first" = nearest the parent = end of the left list
    out = apply_edit(t, EditOp("MOVE-SIBLING", uid_of(t, "a"),
                               side="left", position="first"))
    assert [c.lemma for c in out.root.left] == ["b", "a"]
    out2 = apply_edit(t, EditOp("MOVE-SIBLING", uid_of(t, "b"),
                                side="left", position="last"))
    assert [c.lemma for c in out2.root.left] == ["b", "a"]


def test_relabel_edge():
    t = two_node()
    out = apply_edit(t, EditOp("RELABEL-EDGE", uid_of(t, "dog"), edge="obj"))
    assert out.root.left[0].deprel == "obj"


def test_edit_arity_checked():
    with pytest.raises(IllegalEdit):
        EditOp("DELETE-LEAF", 0, lemma="extra")
    with pytest.raises(IllegalEdit):
        EditOp("RELABEL-NODE", 0, lemma="x")  # missing pos


def test_apply_edit_is_persistent():
    rng = random.Random(4)
    for _ in range(20):
        t = annotate_uids(random_tree(rng, max_nodes=6))
        before = t.signature()
        leaves = [n.uid for n in t.nodes() if not n.children() and n.uid != t.root.uid]
        if not leaves:
            continue
        apply_edit(t, EditOp("DELETE-LEAF", leaves[0]))
        assert t.signature() == before


# --- trees_equal -------------------------------------------------------------


def test_trees_equal_self_and_label_difference():
    t = two_node()
    assert trees_equal(t, t)
    other = tree(node("bark", "VERB", "root", left=[leaf("cat", "NOUN", "nsubj")]))
    assert not trees_equal(t, other)


def test_trees_equal_side_matters():
    left_child = tree(node("a", "X", "root", left=[leaf("b", "X", "dep")]))
    right_child = tree(node("a", "X", "root", right=[leaf("b", "X", "dep")]))
    assert not trees_equal(left_child, right_child)


# --- find_edit_sequence -------------------------------------------------------


def test_identical_trees_zero_ops():
    t = two_node()
    seq = find_edit_sequence(t, t)
    assert seq.found and seq.ops == ()


def test_single_relabel_found_and_optimal():
    src = tree(node("bark", "VERB", "root", left=[leaf("dog", "NOUN", "nsubj")]))
    tgt = tree(node("bark", "VERB", "root", left=[leaf("cat", "NOUN", "nsubj")]))
    seq = find_edit_sequence(src, tgt)
    assert seq.found and len(seq.ops) == 1
    assert seq.ops[0].kind == "RELABEL-NODE"
    assert bfs_min_script_length(src, tgt) == 1


def test_single_insert_found():
    src = tree(node("bark", "VERB", "root"))
    tgt = tree(node("bark", "VERB", "root", left=[leaf("dog", "NOUN", "nsubj")]))
    seq = find_edit_sequence(src, tgt)
    assert seq.found and len(seq.ops) == 1
    assert seq.ops[0].kind == "INSERT-CHILD"
    assert bfs_min_script_length(src, tgt) == 1


def test_found_sequences_are_sound_on_random_pairs():
    rng = random.Random(99)
    config = SearchConfig(beam_width=50, max_expansions=400)
    found = 0
    for _ in range(50):
        src = random_tree(rng, max_nodes=6)
        tgt = random_tree(rng, max_nodes=6)
        seq = find_edit_sequence(src, tgt, config)
        if seq.found:
            found += 1
            _records, final = replay(annotate_uids(src), seq.ops)
            assert trees_equal(final, tgt)
    assert found >= 40  # the tight budget should still resolve most pairs


def test_heuristic_deltas_match_recomputation():
    # the search ranks candidates by incremental heuristic deltas; verify
    # they agree exactly with recomputing the heuristic from scratch
    from propmatch.treeedit import (
        _Mut, _apply_to_mut, _delta_candidates, _heuristic, _make_op,
        target_inventory,
    )

    rng = random.Random(5)
    for _ in range(40):
        src = random_tree(rng, max_nodes=7)
        tgt = random_tree(rng, max_nodes=7)
        m = _Mut(annotate_uids(src))
        inventory = target_inventory(tgt)
        _sig, t_prof = _Mut(annotate_uids(tgt)).sig_and_profile()
        t_root = tgt.root.lemma
        _sig0, prof = m.sig_and_profile()
        root_lemma = m.attrs[m.root][0]
        hp, hs = _heuristic(prof, root_lemma, t_prof, t_root)
        max_uid = max(uid for uid, _ in m.preorder())
        cands = _delta_candidates(m, prof, root_lemma, t_prof, t_root,
                                  inventory, max(src.size(), tgt.size()) + 2)
        for dp, ds, spec in rng.sample(cands, min(10, len(cands))):
            m2 = m.copy()
            _apply_to_mut(m2, _make_op(spec, max_uid + 1))
            _sig2, prof2 = m2.sig_and_profile()
            hp2, hs2 = _heuristic(prof2, m2.attrs[m2.root][0], t_prof, t_root)
            assert (hp + dp, hs + ds) == (hp2, hs2)


def test_budget_exhaustion_returns_not_found():
    src = tree(node("a", "X", "root"))
    tgt = tree(node("b", "Y", "root",
                    left=[node("c", "Z", "dep", left=[leaf("d", "W", "dep")])],
                    right=[leaf("e", "V", "dep")]))
    seq = find_edit_sequence(src, tgt, SearchConfig(beam_width=2, max_expansions=3))
    assert not seq.found and seq.ops == ()
    assert seq.source_unedited["total"] == 1


def test_determinism_of_search():
    rng = random.Random(7)
    src = random_tree(rng, max_nodes=5)
    tgt = random_tree(rng, max_nodes=5)
    a = find_edit_sequence(src, tgt)
    b = find_edit_sequence(src, tgt)
    assert a == b


def test_beam_matches_bfs_on_small_pairs():
    # exhaustive BFS blows up fast, so the oracle only certifies pairs
    # within 3 edits; the beam must match it exactly on those
    rng = random.Random(3)
    config = SearchConfig(beam_width=500, max_expansions=50000)
    checked = 0
    for _ in range(15):
        src = random_tree(rng, max_nodes=3, lemmas=["a", "b", "c"],
                          pos_tags=["NOUN", "VERB"], deprels=["nsubj", "obj"])
        tgt = random_tree(rng, max_nodes=3, lemmas=["a", "b", "c"],
                          pos_tags=["NOUN", "VERB"], deprels=["nsubj", "obj"])
        oracle = bfs_min_script_length(src, tgt, max_depth=3)
        if oracle is None:
            continue
        seq = find_edit_sequence(src, tgt, config)
        assert seq.found
        assert len(seq.ops) == oracle
        checked += 1
    assert checked >= 6


def test_sequence_json_roundtrip():
    src = tree(node("bark", "VERB", "root"))
    tgt = tree(node("bark", "VERB", "root", left=[leaf("dog", "NOUN", "nsubj")]))
    seq = find_edit_sequence(src, tgt)
    again = sequence_from_json(sequence_to_json(seq))
    assert again == seq
