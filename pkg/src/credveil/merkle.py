"""Fixed-depth append-only Merkle trees with O(depth) frontier updates.

Trees are zero-padded to capacity 2^depth.  The frontier holds, per level,
the root of the rightmost complete subtree, which is all the incremental
append needs.  An interior node map is kept alongside for membership proofs.
The identity tree additionally supports in-place leaf replacement (public
key refresh rewrites a record rather than appending a second one).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import CapacityExceeded, NotFound
from .hashing import h2, zero_hashes
from .params import ProtocolParams


@dataclass(frozen=True)
class MerkleProof:
    """Sibling values along the leaf-to-root path, one per level."""

    index: int
    siblings: tuple


class RootWindow:
    """Ring of the most recent roots a verifier will accept."""

    def __init__(self, width: int):
        self._roots: deque = deque(maxlen=width)

    def push(self, root: int) -> None:
        self._roots.append(root)

    def accepts(self, root: int) -> bool:
        return root in self._roots

    def reset_to(self, root: int) -> None:
        """Drop all stale views; only ``root`` remains acceptable."""
        self._roots.clear()
        self._roots.append(root)

    def __len__(self) -> int:
        return len(self._roots)

    def snapshot(self) -> tuple:
        return tuple(self._roots)


class MerkleTree:
    def __init__(self, params: ProtocolParams, depth: int | None = None):
        self.params = params
        self.depth = params.tree_depth if depth is None else depth
        self.leaves: list[int] = []
        self._zeros = zero_hashes(params, self.depth)
        # frontier[h] = root of the rightmost complete subtree at level h;
        # the top entry holds the root once the tree is full
        self.frontier: list[int] = list(self._zeros[: self.depth + 1])
        # nodes[h] maps index -> value for occupied interior nodes
        self._nodes: list[dict[int, int]] = [dict() for _ in range(self.depth + 1)]

    @property
    def capacity(self) -> int:
        return 1 << self.depth

    @property
    def root(self) -> int:
        return self._root_from_frontier()

    def append(self, leaf: int) -> int:
        """Append a leaf, returning the new root.  O(depth) hash work."""
        index = len(self.leaves)
        if index >= self.capacity:
            raise CapacityExceeded("merkle tree is full")
        self.leaves.append(leaf)
        self._update_frontier(index, leaf)
        self._update_nodes(index, leaf)
        return self.root

    def replace(self, index: int, leaf: int) -> int:
        """Replace an existing leaf in place, returning the new root."""
        if not 0 <= index < len(self.leaves):
            raise NotFound("leaf index not occupied")
        self.leaves[index] = leaf
        self._update_nodes(index, leaf)
        self._rebuild_frontier()
        return self.root

    def prove(self, index: int) -> MerkleProof:
        if not 0 <= index < len(self.leaves):
            raise NotFound("leaf index not occupied")
        siblings = []
        node = index
        for level in range(self.depth):
            sibling = node ^ 1
            siblings.append(self._nodes[level].get(sibling, self._zeros[level]))
            node >>= 1
        return MerkleProof(index=index, siblings=tuple(siblings))

    @classmethod
    def build(cls, params: ProtocolParams, leaves, depth: int | None = None) -> "MerkleTree":
        tree = cls(params, depth)
        if len(leaves) > tree.capacity:
            raise CapacityExceeded("merkle tree is full")
        for leaf in leaves:
            tree.append(leaf)
        return tree

    def _update_frontier(self, index: int, value: int) -> None:
        # fold completed subtrees upward; see also the rebuild oracle in tests
        level = 0
        while (index + 1) % (1 << (level + 1)) == 0:
            value = h2(self.params, self.frontier[level], value)
            level += 1
        self.frontier[level] = value

    def _rebuild_frontier(self) -> None:
        # frontier[h] is consulted only when bit h of the leaf count is set,
        # and then holds node (count >> h) - 1 at level h
        count = len(self.leaves)
        self.frontier = list(self._zeros[: self.depth + 1])
        for level in range(self.depth + 1):
            if (count >> level) & 1:
                self.frontier[level] = self._nodes[level][(count >> level) - 1]

    def _update_nodes(self, index: int, value: int) -> None:
        self._nodes[0][index] = value
        node = index
        for level in range(self.depth):
            sibling = node ^ 1
            sib_val = self._nodes[level].get(sibling, self._zeros[level])
            left, right = (
                (self._nodes[level][node], sib_val)
                if node % 2 == 0
                else (sib_val, self._nodes[level][node])
            )
            parent = node >> 1
            self._nodes[level + 1][parent] = h2(self.params, left, right)
            node = parent

    def _root_from_frontier(self) -> int:
        # fold the frontier against zero subtrees along the right edge
        count = len(self.leaves)
        if count == self.capacity:
            return self.frontier[self.depth]
        value = self._zeros[0]
        for level in range(self.depth):
            if (count >> level) & 1:
                value = h2(self.params, self.frontier[level], value)
            else:
                value = h2(self.params, value, self._zeros[level])
        return value

    def __len__(self) -> int:
        return len(self.leaves)


def verify_membership(
    params: ProtocolParams, root: int, leaf: int, proof: MerkleProof
) -> bool:
    """Fold h2 along the path and compare against the claimed root."""
    if proof.index < 0 or proof.index >= 1 << len(proof.siblings):
        return False
    value = leaf
    node = proof.index
    for sibling in proof.siblings:
        if node % 2 == 0:
            value = h2(params, value, sibling)
        else:
            value = h2(params, sibling, value)
        node >>= 1
    return value == root
