"""
Named voting-tree constructions: one-against-a-set, the baseline bracket,
the Omega lower-bound family, the shuffle tree Phi, one-against-all and its
self-composition, and the anti-manipulator tree Psi.
"""
from __future__ import annotations

import itertools
import logging
from functools import lru_cache
from math import comb
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, ShapeError
from .voting_tree import (
    Candidate,
    LabelLike,
    ShapePolicy,
    TreeLike,
    Variable,
    VotingTree,
    as_label,
    as_tree,
    combine,
    from_tuple,
    match,
    relabel,
    substitute,
    substitute_many,
)

logger = logging.getLogger(__name__)

PLACEHOLDER = Variable("X")


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def against(i: TreeLike, S: Sequence[TreeLike], shape: ShapePolicy = ShapePolicy.HEAP,
            rng: Optional[np.random.Generator] = None) -> VotingTree:
    """One match (i, s) per s in S, joined by the shape policy. No membership check."""
    if len(S) == 0:
        raise DomainError("the opponent set must be nonempty")
    return combine([match(i, s) for s in S], shape, rng)


def lambda_against(i: TreeLike, S: Sequence[LabelLike], shape: ShapePolicy = ShapePolicy.HEAP,
                   rng: Optional[np.random.Generator] = None) -> VotingTree:
    """
    Lambda_{i:S}. Returns i iff i beats every member of S, otherwise some
    member of S that beats i, whatever the shape of the combining tree.

    Args:
        i: a label or a whole subtree playing the "i" role
        S: opponent labels, must not contain i
        shape: how the |S| pair matches are joined
        rng: required for ShapePolicy.RANDOM
    """
    opponents = [as_label(s) for s in S]
    if not opponents:
        raise DomainError("Lambda_{i:S} needs a nonempty S")
    if len(set(opponents)) != len(opponents):
        raise DomainError("S must not repeat a label")
    if not isinstance(i, VotingTree) or i.is_leaf:
        own = as_tree(i).label
        if own in opponents:
            raise DomainError(f"{own} cannot play against a set containing itself")
    return against(i, opponents, shape, rng)


def baseline(n: int) -> VotingTree:
    """The balanced bracket over 0..n-1 in identity order."""
    if not _is_power_of_two(n) or n < 2:
        raise ShapeError(f"baseline needs a power of two n >= 2, got {n}")
    return from_tuple(range(n))


def omega_candidates(k: int) -> int:
    """Number of candidates of the level-k tree: k(k+1)/2 + 1."""
    return k * (k + 1) // 2 + 1


def omega_leaf_count(k: int) -> int:
    """Expanded leaf count of omega(k) from the size recurrence, without building it."""
    if k < 1:
        raise DomainError(f"omega levels start at 1, got {k}")
    leaves = 2
    for level in range(1, k):
        n = omega_candidates(level)
        leaves = comb(n + level, n) * (1 + leaves)
    return leaves


@lru_cache(maxsize=None)
def omega(k: int) -> VotingTree:
    """
    Tree on k(k+1)/2+1 candidates whose winner always has out-degree >= k.

    Level k+1 from level k on n candidates: candidate 0 plays, once per
    n-subset of {1..n+k} (lexicographic), against a copy of the level-k tree
    relabeled order-preservingly onto that subset.
    """
    if k < 1:
        raise DomainError(f"omega levels start at 1, got {k}")
    if k == 1:
        return match(0, 1)
    previous = omega(k - 1)
    n = omega_candidates(k - 1)
    copies = [
        relabel(previous, dict(zip(range(n), subset)))
        for subset in itertools.combinations(range(1, n + k), n)
    ]
    tree = against(0, copies)
    logger.debug(f"Built omega({k}) on {omega_candidates(k)} candidates, {tree.leaf_count} leaves")
    return tree


def omega_for(n: int) -> tuple[int, VotingTree]:
    """Highest-level omega fitting n candidates; extra candidates never appear on leaves."""
    if n < 2:
        raise DomainError(f"omega needs at least 2 candidates, got {n}")
    k = 1
    while omega_candidates(k + 1) <= n:
        k += 1
    return k, omega(k)


def phi_perm(n: int, i: int) -> int:
    """The perfect shuffle on 1..n: odd i -> (i+1)/2, even i -> n/2 + i/2."""
    if n < 2 or n % 2:
        raise DomainError(f"the shuffle is defined for even n >= 2, got {n}")
    if not 1 <= i <= n:
        raise DomainError(f"shuffle index {i} out of range 1..{n}")
    return (i + 1) // 2 if i % 2 else n // 2 + i // 2


def phi_tree(n: int) -> VotingTree:
    """Complete tree over (0..n-1) followed by its shuffle; 2n leaves."""
    if not _is_power_of_two(n) or n < 4:
        raise ShapeError(f"phi needs a power of two n >= 4, got {n}")
    shuffled = [phi_perm(n, i) - 1 for i in range(1, n + 1)]
    return from_tuple([*range(n), *shuffled])


def lambda_full(i: LabelLike, n: int) -> VotingTree:
    """
    Lambda_i on n candidates. A candidate plays all the others; a variable
    plays all n candidates, itself included once it is bound.
    """
    if n < 3:
        raise DomainError(f"one-against-all needs n >= 3, got {n}")
    label = as_label(i)
    if isinstance(label, Candidate):
        if label.index >= n:
            raise DomainError(f"candidate {label.index} out of range for n={n}")
        return lambda_against(label, [v for v in range(n) if v != label.index])
    return against(label, list(range(n)))


def lambda_sq(i: LabelLike, n: int) -> VotingTree:
    """Lambda_i with every leaf l replaced by a shared Lambda_l."""
    outer = lambda_full(i, n)
    mapping = {Candidate(m): lambda_full(m, n) for m in range(n)}
    label = as_label(i)
    if isinstance(label, Variable):
        mapping[label] = outer
    return substitute_many(outer, mapping)


def psi(n: int) -> VotingTree:
    """
    Tree the manipulator alpha of a perfect manipulator tournament never wins.
    Lambda^2 is built around a placeholder variable and Phi is substituted for it.
    """
    if not _is_power_of_two(n) or n < 4:
        raise ShapeError(f"psi needs a power of two n >= 4, got {n}")
    tree = substitute(lambda_sq(PLACEHOLDER, n), PLACEHOLDER, phi_tree(n))
    logger.debug(f"Built psi({n}) with {tree.leaf_count} leaves")
    return tree


def psi_anchored(n: int, j: int = 0) -> VotingTree:
    """
    Phi substituted for every leaf labeled j in Lambda_j^2. Candidate j then
    vanishes from the opponent lists, so the manipulator can win
    (n=4, j=0: alpha=1, B={2,3}, C={0}, 2 beats 3).
    """
    if not _is_power_of_two(n) or n < 4:
        raise ShapeError(f"psi needs a power of two n >= 4, got {n}")
    if not 0 <= j < n:
        raise DomainError(f"anchor {j} out of range for n={n}")
    return substitute(lambda_sq(j, n), j, phi_tree(n))
