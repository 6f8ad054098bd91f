"""Fixed-depth binary Merkle accumulator.

Level-0 nodes are ``H(MT_LEAF || leaf)`` for real leaves and a constant
``EMPTY_LEAF`` for padding; inner nodes are ``H(MT_NODE || left || right)``.
Only the filled prefix of each level is materialised, the rest is read from
the per-level empty-subtree table.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from ..encoding import Writer
from ..errors import TreeFull
from .hashing import DIGEST_SIZE, Domain, H
from .params import DEFAULT_TREE_DEPTH

EMPTY_LEAF = H(Domain.MT_EMPTY, b"dtl/empty-leaf")

_LEAF = bytes((Domain.MT_LEAF,))
_NODE = bytes((Domain.MT_NODE,))


def leaf_node(leaf: bytes) -> bytes:
    return hashlib.sha256(_LEAF + leaf).digest()


def node(left: bytes, right: bytes) -> bytes:
    return hashlib.sha256(_NODE + left + right).digest()


@lru_cache(maxsize=None)
def empty_subtrees(depth: int) -> tuple[bytes, ...]:
    """Root of an all-empty subtree at each height 0..depth."""
    out = [EMPTY_LEAF]
    for _ in range(depth):
        out.append(node(out[-1], out[-1]))
    return tuple(out)


@dataclass(frozen=True)
class AccumulatorState:
    root: bytes
    leaf_count: int

    def encode(self) -> bytes:
        return Writer().fixed(self.root, DIGEST_SIZE).u64(self.leaf_count).getvalue()

    def __deepcopy__(self, memo):
        return self


@dataclass(frozen=True)
class MerklePath:
    index: int
    siblings: tuple[bytes, ...]

    @property
    def depth(self) -> int:
        return len(self.siblings)


class MerkleTree:
    """Batch-built tree keeping every filled level so paths are O(depth)."""

    def __init__(self, leaves: Sequence[bytes], depth: int = DEFAULT_TREE_DEPTH) -> None:
        if len(leaves) > 1 << depth:
            raise TreeFull(f"{len(leaves)} leaves exceed capacity 2^{depth}")
        self.depth = depth
        self.leaves = tuple(leaves)
        zeros = empty_subtrees(depth)
        level = [leaf_node(x) for x in self.leaves]
        self._levels = [level]
        for h in range(depth):
            if len(level) % 2:
                level = level + [zeros[h]]
            level = [node(level[i], level[i + 1]) for i in range(0, len(level), 2)]
            self._levels.append(level)
        self.root = level[0] if level else zeros[depth]
        self._index: dict[bytes, int] | None = None

    @property
    def state(self) -> AccumulatorState:
        return AccumulatorState(self.root, len(self.leaves))

    def index_of(self, leaf: bytes) -> int:
        """First position of ``leaf`` or -1."""
        if self._index is None:
            idx: dict[bytes, int] = {}
            for i, x in enumerate(self.leaves):
                idx.setdefault(x, i)
            self._index = idx
        return self._index.get(leaf, -1)

    def prove(self, index: int) -> MerklePath:
        if not 0 <= index < len(self.leaves):
            raise IndexError(f"leaf index {index} out of range")
        zeros = empty_subtrees(self.depth)
        sib = []
        i = index
        for h in range(self.depth):
            level = self._levels[h]
            j = i ^ 1
            sib.append(level[j] if j < len(level) else zeros[h])
            i >>= 1
        return MerklePath(index, tuple(sib))


class IncrementalMerkleTree:
    """Append-only tree storing only the left frontier (single writer)."""

    def __init__(self, depth: int = DEFAULT_TREE_DEPTH) -> None:
        self.depth = depth
        self._zeros = empty_subtrees(depth)
        self._filled: list[bytes] = list(self._zeros[:depth])
        self.leaf_count = 0
        self.root = self._zeros[depth]

    @property
    def state(self) -> AccumulatorState:
        return AccumulatorState(self.root, self.leaf_count)

    def insert(self, leaf: bytes) -> AccumulatorState:
        if self.leaf_count >= 1 << self.depth:
            raise TreeFull(f"tree of depth {self.depth} is full")
        i = self.leaf_count
        cur = leaf_node(leaf)
        for h in range(self.depth):
            if i & 1:
                cur = node(self._filled[h], cur)
            else:
                self._filled[h] = cur
                cur = node(cur, self._zeros[h])
            i >>= 1
        self.leaf_count += 1
        self.root = cur
        return self.state


@lru_cache(maxsize=16)
def _cached_tree(leaves: tuple[bytes, ...], depth: int) -> MerkleTree:
    return MerkleTree(leaves, depth)


def tree_for(leaves: Sequence[bytes], depth: int = DEFAULT_TREE_DEPTH) -> MerkleTree:
    """Memoised :class:`MerkleTree`; the tree is a pure function of its leaves."""
    return _cached_tree(tuple(leaves), depth)


def mt_build(leaves: Sequence[bytes], depth: int = DEFAULT_TREE_DEPTH) -> AccumulatorState:
    return tree_for(leaves, depth).state


def mt_insert(tree: IncrementalMerkleTree, leaf: bytes) -> AccumulatorState:
    return tree.insert(leaf)


def mt_prove(index: int, leaf: bytes, leaves: Sequence[bytes],
             depth: int = DEFAULT_TREE_DEPTH) -> MerklePath:
    if not 0 <= index < len(leaves):
        raise IndexError(f"leaf index {index} out of range")
    if leaves[index] != leaf:
        raise ValueError(f"leaf at index {index} does not match")
    return tree_for(leaves, depth).prove(index)


def mt_verify(index: int, leaf: bytes, root: bytes, path: MerklePath) -> int:
    d = path.depth
    if not 0 <= index < 1 << d:
        return 0
    cur = leaf_node(leaf)
    i = index
    for s in path.siblings:
        cur = node(s, cur) if i & 1 else node(cur, s)
        i >>= 1
    return int(cur == root)
