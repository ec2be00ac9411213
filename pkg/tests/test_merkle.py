import random

import pytest
from hypothesis import given, settings, strategies as st

from credveil.errors import CapacityExceeded, NotFound
from credveil.hashing import h2, zero_hashes
from credveil.merkle import MerkleProof, MerkleTree, RootWindow, verify_membership
from credveil.params import ProtocolParams

P = ProtocolParams(tree_depth=8)

fe = st.integers(min_value=0, max_value=P.prime - 1)


def rebuild_root(leaves, depth):
    """Independent oracle: hash the fully padded tree bottom-up."""
    level = list(leaves) + [0] * ((1 << depth) - len(leaves))
    for _ in range(depth):
        level = [h2(P, level[i], level[i + 1]) for i in range(0, len(level), 2)]
    return level[0]


def test_empty_root_is_padding_constant():
    assert MerkleTree(P, 8).root == zero_hashes(P, 8)[8]
    assert MerkleTree(P, 8).root == rebuild_root([], 8)


def test_append_changes_root_from_padding():
    tree = MerkleTree(P, 8)
    empty = tree.root
    tree.append(123)
    assert tree.root != empty


def test_frontier_matches_rebuild_for_every_prefix():
    rng = random.Random(1)
    tree = MerkleTree(P, 8)
    leaves = []
    for _ in range(256):
        leaf = rng.randrange(P.prime)
        leaves.append(leaf)
        tree.append(leaf)
        assert tree.root == rebuild_root(leaves, 8)


def test_capacity_exceeded():
    tree = MerkleTree(P, 2)
    for i in range(4):
        tree.append(i)
    with pytest.raises(CapacityExceeded):
        tree.append(9)


def test_build_matches_incremental():
    rng = random.Random(2)
    leaves = [rng.randrange(P.prime) for _ in range(17)]
    assert MerkleTree.build(P, leaves, 8).root == rebuild_root(leaves, 8)


def test_duplicate_leaves_get_distinct_indices():
    tree = MerkleTree(P, 8)
    tree.append(7)
    tree.append(7)
    assert tree.leaves == [7, 7]
    assert tree.prove(0).index == 0 and tree.prove(1).index == 1


@settings(max_examples=30)
@given(st.lists(fe, min_size=1, max_size=40), st.randoms(use_true_random=False))
def test_membership_round_trip(leaves, rnd):
    tree = MerkleTree.build(P, leaves, 8)
    index = rnd.randrange(len(leaves))
    proof = tree.prove(index)
    assert len(proof.siblings) == 8
    assert verify_membership(P, tree.root, leaves[index], proof)


def test_singleton_proof_against_padding():
    tree = MerkleTree(P, 8)
    tree.append(55)
    proof = tree.prove(0)
    assert proof.siblings == zero_hashes(P, 8)[:8]
    assert verify_membership(P, tree.root, 55, proof)


def test_flipped_sibling_rejected():
    tree = MerkleTree.build(P, [1, 2, 3], 8)
    proof = tree.prove(1)
    for position in range(8):
        siblings = list(proof.siblings)
        siblings[position] = (siblings[position] + 1) % P.prime
        bad = MerkleProof(index=proof.index, siblings=tuple(siblings))
        assert not verify_membership(P, tree.root, 2, bad)


def test_wrong_leaf_rejected():
    tree = MerkleTree.build(P, [1, 2, 3], 8)
    assert not verify_membership(P, tree.root, 9, tree.prove(1))


def test_prove_out_of_range():
    tree = MerkleTree.build(P, [1], 8)
    with pytest.raises(NotFound):
        tree.prove(1)


def test_replace_consistency():
    rng = random.Random(3)
    leaves = [rng.randrange(P.prime) for _ in range(9)]
    tree = MerkleTree.build(P, leaves, 8)
    tree.replace(4, 777)
    leaves[4] = 777
    assert tree.root == rebuild_root(leaves, 8)
    assert verify_membership(P, tree.root, 777, tree.prove(4))
    tree.append(888)
    leaves.append(888)
    assert tree.root == rebuild_root(leaves, 8)


def test_replace_unoccupied_rejected():
    tree = MerkleTree.build(P, [1, 2], 8)
    with pytest.raises(NotFound):
        tree.replace(2, 5)


def test_root_window_semantics():
    window = RootWindow(3)
    for root in (10, 20, 30, 40):
        window.push(root)
    assert not window.accepts(10)  # evicted
    assert all(window.accepts(r) for r in (20, 30, 40))
    window.reset_to(99)
    assert window.accepts(99) and len(window) == 1
    assert not window.accepts(40)


def test_window_accepts_recent_roots_for_proofs():
    tree = MerkleTree(P, 8)
    window = RootWindow(4)
    window.push(tree.root)
    roots = []
    for i in range(6):
        roots.append(tree.append(i))
        window.push(roots[-1])
    # proofs against any of the last 4 roots verify with historical leaves
    assert window.accepts(roots[-1]) and window.accepts(roots[-4])
    assert not window.accepts(roots[0])
