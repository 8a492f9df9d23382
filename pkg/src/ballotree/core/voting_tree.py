"""
Voting trees stored as hash-consed DAGs.

Structurally identical subtrees share one node object, so constructions whose
expanded form has billions of leaves stay small in memory. Every node caches
its expanded leaf count (a Python int, so it never overflows) and its depth.
"""
from __future__ import annotations

import itertools
import logging
import numbers
import re
import threading
import weakref
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import BindingError, DomainError, ShapeError
from .tournament import Tournament

logger = logging.getLogger(__name__)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
RESERVED_NAMES = frozenset({"def"})


@dataclass(frozen=True)
class Candidate:
    """A leaf label naming a tournament vertex."""
    index: int

    def __post_init__(self):
        if not isinstance(self.index, int) or isinstance(self.index, bool) or self.index < 0:
            raise DomainError(f"candidate labels are non-negative integers, got {self.index!r}")

    def __str__(self) -> str:
        return str(self.index)


@dataclass(frozen=True)
class Variable:
    """A leaf label standing for a candidate supplied at evaluation time."""
    name: str

    def __post_init__(self):
        if not isinstance(self.name, str) or not _IDENT.match(self.name):
            raise DomainError(f"variable names are identifiers, got {self.name!r}")
        if self.name in RESERVED_NAMES:
            raise DomainError(f"'{self.name}' is reserved by the tree text format")

    def __str__(self) -> str:
        return self.name


Label = Union[Candidate, Variable]
LabelLike = Union[Candidate, Variable, int, str]
Bindings = Mapping[str, int]


def as_label(value: LabelLike) -> Label:
    if isinstance(value, (Candidate, Variable)):
        return value
    if isinstance(value, numbers.Integral) and not isinstance(value, bool):
        return Candidate(int(value))
    if isinstance(value, str):
        return Candidate(int(value)) if value.isdecimal() else Variable(value)
    raise DomainError(f"cannot use {value!r} as a leaf label")


class VotingTree:
    """
    A canonical node: either a leaf carrying a label, or a match between a
    left and a right subtree. Never instantiate directly; use leaf() / node().
    """
    __slots__ = ("label", "left", "right", "leaf_count", "depth", "uid", "__weakref__")

    def __init__(self, uid: int, label: Optional[Label] = None,
                 left: Optional["VotingTree"] = None, right: Optional["VotingTree"] = None):
        self.uid = uid
        self.label = label
        self.left = left
        self.right = right
        if label is not None:
            self.leaf_count = 1
            self.depth = 0
        else:
            self.leaf_count = left.leaf_count + right.leaf_count
            self.depth = 1 + max(left.depth, right.depth)

    @property
    def is_leaf(self) -> bool:
        return self.label is not None

    def __reduce__(self):
        # Re-intern on unpickle so identity stays canonical in the receiving process
        if self.is_leaf:
            return (leaf, (self.label,))
        return (node, (self.left, self.right))

    def __repr__(self) -> str:
        if self.is_leaf:
            return f"leaf({self.label})"
        return f"<VotingTree #{self.uid} leaves={self.leaf_count} depth={self.depth}>"


TreeLike = Union[VotingTree, Candidate, Variable, int, str]


class _NodeTable:
    """Canonicalization table; the only shared mutable state, guarded by a lock."""

    def __init__(self):
        self._nodes: "weakref.WeakValueDictionary[tuple, VotingTree]" = weakref.WeakValueDictionary()
        self._lock = threading.Lock()
        self._uids = itertools.count()

    def intern(self, key: tuple, **fields) -> VotingTree:
        with self._lock:
            existing = self._nodes.get(key)
            if existing is None:
                existing = VotingTree(next(self._uids), **fields)
                self._nodes[key] = existing
            return existing

    def __len__(self) -> int:
        return len(self._nodes)


_table = _NodeTable()


def leaf(label: LabelLike) -> VotingTree:
    label = as_label(label)
    return _table.intern(("leaf", label), label=label)


def as_tree(value: TreeLike) -> VotingTree:
    return value if isinstance(value, VotingTree) else leaf(value)


def node(left: TreeLike, right: TreeLike) -> VotingTree:
    """The match between two subtrees; the left child is the first-listed competitor."""
    left, right = as_tree(left), as_tree(right)
    return _table.intern(("node", left.uid, right.uid), left=left, right=right)


def match(i: TreeLike, j: TreeLike) -> VotingTree:
    """M_{i,j}: i advances iff i = j or i beats j."""
    return node(i, j)


def from_tuple(labels: Sequence[TreeLike]) -> VotingTree:
    """Complete binary tree whose left-to-right leaves are the given sequence."""
    items = [as_tree(x) for x in labels]
    size = len(items)
    if size == 0 or size & (size - 1):
        raise ShapeError(f"a complete tree needs a power-of-two number of leaves, got {size}")
    while len(items) > 1:
        items = [node(items[k], items[k + 1]) for k in range(0, len(items), 2)]
    return items[0]


class ShapePolicy(Enum):
    """How a sequence of subtrees is joined into one tree, left-to-right order preserved."""
    HEAP = "heap"  # left-complete: bottom level filled from the left
    CATERPILLAR = "caterpillar"  # ((a b) c) d ...
    RANDOM = "random"  # repeatedly merge a uniformly chosen adjacent pair


def _heap(items: Sequence[VotingTree]) -> VotingTree:
    size = len(items)
    if size == 1:
        return items[0]
    height = (size - 1).bit_length()
    left = 1 if height == 1 else min(1 << (height - 1), size - (1 << (height - 2)))
    return node(_heap(items[:left]), _heap(items[left:]))


def combine(subtrees: Sequence[TreeLike], shape: ShapePolicy = ShapePolicy.HEAP,
            rng: Optional[np.random.Generator] = None) -> VotingTree:
    items = [as_tree(x) for x in subtrees]
    if not items:
        raise ShapeError("cannot combine an empty sequence of subtrees")
    if shape is ShapePolicy.HEAP:
        return _heap(items)
    if shape is ShapePolicy.CATERPILLAR:
        result = items[0]
        for item in items[1:]:
            result = node(result, item)
        return result
    if rng is None:
        raise ShapeError("the random shape policy needs a numpy Generator")
    while len(items) > 1:
        k = int(rng.integers(len(items) - 1))
        items[k:k + 2] = [node(items[k], items[k + 1])]
    return items[0]


def iter_nodes(tree: VotingTree) -> Iterator[VotingTree]:
    """Each distinct DAG node once, children before parents."""
    seen: set[int] = set()
    stack: list[tuple[VotingTree, bool]] = [(tree, False)]
    while stack:
        current, expanded = stack.pop()
        if expanded:
            yield current
            continue
        if current.uid in seen:
            continue
        seen.add(current.uid)
        if current.is_leaf:
            yield current
            continue
        stack.append((current, True))
        stack.append((current.right, False))
        stack.append((current.left, False))


def resolve_label(label: Label, n: int, bindings: Optional[Bindings] = None) -> int:
    if isinstance(label, Variable):
        if bindings is None or label.name not in bindings:
            raise BindingError(label.name)
        value = int(bindings[label.name])
        if not 0 <= value < n:
            raise DomainError(f"variable {label.name} bound to {value}, out of range for n={n}")
        return value
    if label.index >= n:
        raise DomainError(f"leaf label {label.index} out of range for n={n}")
    return label.index


def evaluate(tree: VotingTree, tournament: Tournament, bindings: Optional[Bindings] = None) -> int:
    """
    Winner of the tree on a tournament. Each node is labeled with the result of
    the match between its children's labels; evaluation is memoized per shared node.
    """
    adjacency = tournament.adjacency
    values: dict[int, int] = {}
    for current in iter_nodes(tree):
        if current.is_leaf:
            values[current.uid] = resolve_label(current.label, tournament.n, bindings)
        else:
            i = values[current.left.uid]
            j = values[current.right.uid]
            values[current.uid] = i if adjacency[i][j] else j
    return values[tree.uid]


def substitute_many(tree: VotingTree, mapping: Mapping[LabelLike, TreeLike]) -> VotingTree:
    """Replace, simultaneously, every leaf whose label is a key by the shared replacement tree."""
    table = {as_label(k): as_tree(v) for k, v in mapping.items()}
    if not table:
        return tree
    rebuilt: dict[int, VotingTree] = {}
    for current in iter_nodes(tree):
        if current.is_leaf:
            rebuilt[current.uid] = table.get(current.label, current)
        else:
            rebuilt[current.uid] = node(rebuilt[current.left.uid], rebuilt[current.right.uid])
    return rebuilt[tree.uid]


def substitute(tree: VotingTree, target: LabelLike, replacement: TreeLike) -> VotingTree:
    return substitute_many(tree, {target: replacement})


def relabel(tree: VotingTree, mapping: Mapping[int, int]) -> VotingTree:
    """Rename candidate labels; candidates missing from the mapping are kept."""
    return substitute_many(tree, {Candidate(k): leaf(Candidate(v)) for k, v in mapping.items()})


def labels(tree: VotingTree) -> set[Label]:
    return {current.label for current in iter_nodes(tree) if current.is_leaf}


def candidates(tree: VotingTree) -> set[int]:
    return {label.index for label in labels(tree) if isinstance(label, Candidate)}


def variables(tree: VotingTree) -> set[str]:
    return {label.name for label in labels(tree) if isinstance(label, Variable)}


def leaf_label_counts(tree: VotingTree) -> dict[Label, int]:
    """Expanded multiplicity of every label."""
    counts: dict[int, dict[Label, int]] = {}
    for current in iter_nodes(tree):
        if current.is_leaf:
            counts[current.uid] = {current.label: 1}
        else:
            merged = dict(counts[current.left.uid])
            for label, count in counts[current.right.uid].items():
                merged[label] = merged.get(label, 0) + count
            counts[current.uid] = merged
    return counts[tree.uid]


@dataclass(frozen=True)
class TreeStats:
    leaf_count: int
    depth: int
    dag_nodes: int


def stats(tree: VotingTree) -> TreeStats:
    dag_nodes = sum(1 for _ in iter_nodes(tree))
    return TreeStats(leaf_count=tree.leaf_count, depth=tree.depth, dag_nodes=dag_nodes)
