"""
Vectorized evaluation of one voting tree over many tournaments at once.

A tree is compiled (bindings resolved) into a flat post-order MatchProgram of
plain tuples, which pickles cheaply into worker processes. Tournaments travel
as a boolean tensor beats[b, u, v] with a True diagonal.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .tournament import CLASS_A, CLASS_B, CLASS_C, pair_count, pair_index
from .voting_tree import Bindings, VotingTree, iter_nodes, resolve_label

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatchProgram:
    """Slot s is a leaf (left[s] == -1, candidate value[s]) or the match of two earlier slots."""
    n: int
    left: tuple[int, ...]
    right: tuple[int, ...]
    value: tuple[int, ...]
    release: tuple[tuple[int, ...], ...]  # slots whose last consumer is slot s

    @property
    def size(self) -> int:
        return len(self.left)


def compile_program(tree: VotingTree, n: int, bindings: Optional[Bindings] = None) -> MatchProgram:
    slot_of: dict[int, int] = {}
    left: list[int] = []
    right: list[int] = []
    value: list[int] = []
    for current in iter_nodes(tree):
        slot_of[current.uid] = len(left)
        if current.is_leaf:
            left.append(-1)
            right.append(-1)
            value.append(resolve_label(current.label, n, bindings))
        else:
            left.append(slot_of[current.left.uid])
            right.append(slot_of[current.right.uid])
            value.append(-1)

    last_use: dict[int, int] = {}
    for s, (l, r) in enumerate(zip(left, right)):
        if l >= 0:
            last_use[l] = s
            last_use[r] = s
    release: list[set[int]] = [set() for _ in left]
    for slot, consumer in last_use.items():
        release[consumer].add(slot)
    return MatchProgram(
        n=n,
        left=tuple(left),
        right=tuple(right),
        value=tuple(value),
        release=tuple(tuple(sorted(r)) for r in release),
    )


def run_program(program: MatchProgram, beats: np.ndarray) -> np.ndarray:
    """Winners (shape (batch,)) of the program on every tournament of the batch."""
    batch = beats.shape[0]
    rows = np.arange(batch)
    live: dict[int, object] = {}
    for s in range(program.size):
        l = program.left[s]
        if l < 0:
            live[s] = program.value[s]
        else:
            i = live[l]
            j = live[program.right[s]]
            live[s] = np.where(beats[rows, i, j], i, j)
        for dead in program.release[s]:
            del live[dead]
    result = live[program.size - 1]
    if np.isscalar(result):
        return np.full(batch, result, dtype=np.int64)
    return np.asarray(result, dtype=np.int64)


def beats_from_bits(bits: np.ndarray, n: int) -> np.ndarray:
    """(batch, C(n,2)) orientation bits in canonical pair order -> (batch, n, n) beats tensor."""
    bits = np.asarray(bits, dtype=bool)
    beats = np.ones((bits.shape[0], n, n), dtype=bool)
    upper_u, upper_v = np.triu_indices(n, k=1)
    beats[:, upper_u, upper_v] = bits
    beats[:, upper_v, upper_u] = ~bits
    return beats


def bits_from_codes(codes: np.ndarray, m: int) -> np.ndarray:
    """Integer codes (first pair most significant) -> (batch, m) booleans. Needs m <= 64."""
    codes = np.asarray(codes, dtype=np.uint64)
    shifts = np.arange(m - 1, -1, -1, dtype=np.uint64)
    return ((codes[:, None] >> shifts) & np.uint64(1)).astype(bool)


def code_range_bits(start: int, stop: int, m: int) -> np.ndarray:
    return bits_from_codes(np.arange(start, stop, dtype=np.uint64), m)


def bits_to_code(bits_row: Sequence[bool]) -> int:
    return int("".join("1" if b else "0" for b in bits_row) or "0", 2)


def smallest_code(bits: np.ndarray) -> tuple[int, int]:
    """(row, code) of the smallest bitstring among the rows."""
    m = bits.shape[1]
    if m <= 63:
        weights = np.left_shift(np.uint64(1), np.arange(m - 1, -1, -1, dtype=np.uint64))
        codes = (bits.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)
        row = int(np.argmin(codes))
        return row, int(codes[row])
    codes = [bits_to_code(r) for r in bits]
    row = min(range(len(codes)), key=codes.__getitem__)
    return row, codes[row]


def winner_out_degrees(beats: np.ndarray, winners: np.ndarray) -> np.ndarray:
    rows = np.arange(beats.shape[0])
    return beats[rows, winners, :].sum(axis=1) - 1


def sample_tournament_bits(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    return rng.integers(0, 2, size=(count, pair_count(n)), dtype=np.uint8).astype(bool)


def _class_orientation(classes: np.ndarray, n: int) -> np.ndarray:
    upper_u, upper_v = np.triu_indices(n, k=1)
    cu = classes[..., upper_u].astype(np.int64)
    cv = classes[..., upper_v].astype(np.int64)
    return (cv - cu) % 3 == 1


def pm_group_bits(n: int, alpha: int, B: Sequence[int], C: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """
    All inner orientations of one (alpha, B, C) group, in the same order as
    tournament.enumerate_pm. Returns (bits (2^q, C(n,2)), classes (n,)).
    """
    classes = np.full(n, CLASS_A, dtype=np.int8)
    classes[list(B)] = CLASS_B
    classes[list(C)] = CLASS_C
    base = _class_orientation(classes, n)
    inner = [pair_index(n, u, v) for u, v in itertools.combinations(B, 2)]
    inner += [pair_index(n, u, v) for u, v in itertools.combinations(C, 2)]
    q = len(inner)
    bits = np.broadcast_to(base, (1 << q, base.shape[0])).copy()
    if q:
        bits[:, inner] = bits_from_codes(np.arange(1 << q, dtype=np.uint64), q)
    return bits, classes


def sample_pm_bits(rng: np.random.Generator, count: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Sampled perfect manipulator tournaments, same distribution as
    tournament.sample_pm. Returns (bits (count, C(n,2)), classes (count, n)).
    """
    rows = np.arange(count)
    alpha = rng.integers(0, n, size=count)
    sides = rng.integers(0, 2, size=(count, n), dtype=np.int8)
    while True:
        in_b = (sides == 1).sum(axis=1) - (sides[rows, alpha] == 1)
        bad = (in_b < 1) | (in_b > n - 2)
        if not bad.any():
            break
        sides[bad] = rng.integers(0, 2, size=(int(bad.sum()), n), dtype=np.int8)
    classes = np.where(sides == 1, CLASS_B, CLASS_C).astype(np.int8)
    classes[rows, alpha] = CLASS_A
    forward = _class_orientation(classes, n)
    upper_u, upper_v = np.triu_indices(n, k=1)
    same = classes[:, upper_u] == classes[:, upper_v]
    inner = rng.integers(0, 2, size=forward.shape, dtype=np.uint8).astype(bool)
    return np.where(same, inner, forward), classes
