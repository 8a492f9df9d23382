"""
Tournaments on candidates 0..n-1 and the perfect-manipulator family.

A tournament is stored as one orientation bit per unordered pair {u, v}, u < v,
in lexicographic pair order; a set bit means u beats v. The bitstring is kept
as an integer whose most significant bit is the first pair, so enumerating
codes 0..2^C(n,2)-1 visits bitstrings in increasing order.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from math import comb
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from .errors import DomainError, FormatError, ScaleError
from ..utils.config import get_config

logger = logging.getLogger(__name__)

# Perfect-manipulator classes. For u, v in different classes,
# u beats v iff (class(v) - class(u)) % 3 == 1, i.e. A -> B -> C -> A.
CLASS_A = 0
CLASS_B = 1
CLASS_C = 2
CLASS_NAMES = ("A", "B", "C")


def pair_count(n: int) -> int:
    """C(n, 2): number of orientation bits of an n-vertex tournament."""
    return n * (n - 1) // 2


@lru_cache(maxsize=None)
def pairs(n: int) -> tuple[tuple[int, int], ...]:
    """Canonical pair order, lexicographic by (u, v) with u < v."""
    return tuple(itertools.combinations(range(n), 2))


def pair_index(n: int, u: int, v: int) -> int:
    """Position of the pair {u, v} in the canonical order."""
    if u > v:
        u, v = v, u
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


def tournament_count(n: int) -> int:
    return 1 << pair_count(n)


@dataclass(frozen=True)
class Tournament:
    """Immutable tournament; `code` is the orientation bitstring as an integer."""
    n: int
    code: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"a tournament needs at least one vertex, got n={self.n}")
        if not 0 <= self.code < (1 << pair_count(self.n)):
            raise FormatError(f"code {self.code} does not fit {pair_count(self.n)} orientation bits")

    @property
    def m(self) -> int:
        return pair_count(self.n)

    @property
    def bits(self) -> str:
        return format(self.code, f"0{self.m}b") if self.m else ""

    @cached_property
    def adjacency(self) -> tuple[tuple[bool, ...], ...]:
        """adjacency[u][v] is beats(u, v); the diagonal is True."""
        rows = [[True] * self.n for _ in range(self.n)]
        m = self.m
        for p, (u, v) in enumerate(pairs(self.n)):
            forward = bool((self.code >> (m - 1 - p)) & 1)
            rows[u][v] = forward
            rows[v][u] = not forward
        return tuple(tuple(r) for r in rows)

    def _check(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise DomainError(f"candidate {v} out of range for n={self.n}")

    def beats(self, u: int, v: int) -> bool:
        """True iff u = v or the edge u -> v is present."""
        self._check(u)
        self._check(v)
        return self.adjacency[u][v]

    def out_degree(self, v: int) -> int:
        self._check(v)
        return sum(self.adjacency[v]) - 1

    def out_degrees(self) -> list[int]:
        return [sum(row) - 1 for row in self.adjacency]

    def copeland_winners(self) -> frozenset[int]:
        """All vertices of maximum out-degree."""
        degrees = self.out_degrees()
        best = max(degrees)
        return frozenset(v for v, d in enumerate(degrees) if d == best)

    def matrix(self) -> np.ndarray:
        return np.array(self.adjacency, dtype=bool)

    def to_text(self) -> str:
        return f"n={self.n}\n{self.bits}\n"

    @classmethod
    def from_text(cls, text: str) -> "Tournament":
        lines = [line.strip() for line in text.strip().splitlines() if line.strip()]
        if not lines or not lines[0].startswith("n="):
            raise FormatError("tournament text must start with a line 'n=<k>'")
        try:
            n = int(lines[0][2:])
        except ValueError:
            raise FormatError(f"bad vertex count line {lines[0]!r}") from None
        if len(lines) > 2:
            raise FormatError("tournament text has trailing lines")
        return make_tournament(n, lines[1] if len(lines) == 2 else "")

    def __str__(self) -> str:
        return f"T(n={self.n}, {self.bits or '-'})"


def make_tournament(n: int, bits: Union[str, Sequence[int]]) -> Tournament:
    """Build a tournament from its C(n,2) orientation bits in canonical pair order."""
    if n < 1:
        raise DomainError(f"a tournament needs at least one vertex, got n={n}")
    text = bits.strip() if isinstance(bits, str) else "".join("1" if b else "0" for b in bits)
    m = pair_count(n)
    if len(text) != m:
        raise FormatError(f"expected {m} orientation bits for n={n}, got {len(text)}")
    if any(ch not in "01" for ch in text):
        raise FormatError(f"orientation bits must be 0/1, got {text!r}")
    return Tournament(n, int(text, 2) if m else 0)


def transitive(n: int) -> Tournament:
    """The transitive tournament in which u beats v whenever u < v."""
    return Tournament(n, (1 << pair_count(n)) - 1)


def random_tournament(n: int, seed: int) -> Tournament:
    rng = np.random.default_rng(seed)
    m = pair_count(n)
    bits = rng.integers(0, 2, size=m)
    return make_tournament(n, [int(b) for b in bits])


class Direction(Enum):
    """The two non-transitive tournaments on {0, 1, 2}."""
    CLOCKWISE = "clockwise"  # 0 -> 1, 1 -> 2, 2 -> 0
    COUNTERCLOCKWISE = "counterclockwise"

    @property
    def tournament(self) -> Tournament:
        return direction_tournament(self)


def direction_tournament(direction: Direction) -> Tournament:
    # pair order (0,1), (0,2), (1,2)
    if direction is Direction.CLOCKWISE:
        return make_tournament(3, "101")
    return make_tournament(3, "010")


def _resolve_limit(limit: Optional[int]) -> int:
    return get_config().exhaustive_limit if limit is None else limit


def check_exhaustive(n: int, force: bool = False, limit: Optional[int] = None) -> None:
    """Refuse enumeration of 2^C(n,2) tournaments above the configured limit."""
    limit = _resolve_limit(limit)
    if n > limit and not force:
        raise ScaleError(
            f"exhaustive enumeration over n={n} ({tournament_count(n)} tournaments) "
            f"exceeds the limit n<={limit}; pass force or raise BALLOTREE_EXHAUSTIVE_LIMIT"
        )


def enumerate_tournaments(
    n: int,
    force: bool = False,
    limit: Optional[int] = None,
    start: int = 0,
    stop: Optional[int] = None,
) -> Iterator[Tournament]:
    """All 2^C(n,2) tournaments in increasing bitstring order, optionally an index range of them."""
    check_exhaustive(n, force, limit)
    total = tournament_count(n)
    stop = total if stop is None else min(stop, total)
    for code in range(start, stop):
        yield Tournament(n, code)


@dataclass(frozen=True)
class PerfectManipulatorSpec:
    """
    A perfect manipulator tournament {alpha} + B + C: alpha beats B, B beats C,
    C beats alpha. inner_b / inner_c orient the pairs inside B and C in
    canonical (lexicographic) order of the sorted member lists.
    """
    alpha: int
    B: tuple[int, ...]
    C: tuple[int, ...]
    inner_b: str = ""
    inner_c: str = ""

    def __post_init__(self):
        object.__setattr__(self, "B", tuple(sorted(self.B)))
        object.__setattr__(self, "C", tuple(sorted(self.C)))
        if not self.B or not self.C:
            raise DomainError("perfect manipulator spec needs nonempty B and C")
        members = [self.alpha, *self.B, *self.C]
        if sorted(members) != list(range(len(members))):
            raise DomainError(f"alpha, B and C must partition 0..{len(members) - 1}")
        for name, inner, size in (("innerB", self.inner_b, len(self.B)), ("innerC", self.inner_c, len(self.C))):
            if len(inner) != pair_count(size) or any(ch not in "01" for ch in inner):
                raise FormatError(f"{name} must be {pair_count(size)} bits, got {inner!r}")

    @property
    def n(self) -> int:
        return 1 + len(self.B) + len(self.C)

    def classes(self) -> tuple[int, ...]:
        cls = [CLASS_A] * self.n
        for b in self.B:
            cls[b] = CLASS_B
        for c in self.C:
            cls[c] = CLASS_C
        return tuple(cls)

    def class_of(self, v: int) -> str:
        if not 0 <= v < self.n:
            raise DomainError(f"candidate {v} out of range for n={self.n}")
        return CLASS_NAMES[self.classes()[v]]

    def realize(self) -> Tournament:
        cls = self.classes()
        inner = {}
        for members, bits in ((self.B, self.inner_b), (self.C, self.inner_c)):
            for (u, v), bit in zip(itertools.combinations(members, 2), bits):
                inner[(u, v)] = bit
        out = []
        for u, v in pairs(self.n):
            if cls[u] == cls[v]:
                out.append(inner[(u, v)])
            else:
                out.append("1" if (cls[v] - cls[u]) % 3 == 1 else "0")
        return make_tournament(self.n, "".join(out))

    def to_text(self) -> str:
        return (
            f"alpha={self.alpha}; B={','.join(map(str, self.B))}; C={','.join(map(str, self.C))}; "
            f"innerB={self.inner_b}; innerC={self.inner_c}"
        )

    @classmethod
    def from_text(cls, text: str) -> "PerfectManipulatorSpec":
        fields: dict[str, str] = {}
        for part in text.strip().split(";"):
            if not part.strip():
                continue
            key, sep, value = part.partition("=")
            if not sep:
                raise FormatError(f"expected key=value, got {part.strip()!r}")
            fields[key.strip()] = value.strip()
        missing = {"alpha", "B", "C", "innerB", "innerC"} - fields.keys()
        if missing:
            raise FormatError(f"spec text is missing {', '.join(sorted(missing))}")
        try:
            alpha = int(fields["alpha"])
            B = tuple(int(x) for x in fields["B"].split(",") if x.strip())
            C = tuple(int(x) for x in fields["C"].split(",") if x.strip())
        except ValueError as e:
            raise FormatError(f"bad candidate list in spec text: {e}") from None
        return cls(alpha, B, C, fields["innerB"], fields["innerC"])


def realize_pm(spec: PerfectManipulatorSpec) -> Tournament:
    return spec.realize()


def pm_count(n: int) -> int:
    """Closed-form number of perfect manipulator specs on n candidates."""
    if n < 3:
        return 0
    return n * sum(
        comb(n - 1, b) * (1 << (pair_count(b) + pair_count(n - 1 - b)))
        for b in range(1, n - 1)
    )


def pm_groups(n: int) -> Iterator[tuple[int, tuple[int, ...], tuple[int, ...]]]:
    """(alpha, B, C) in enumeration order: alpha ascending, then B-membership masks ascending."""
    if n < 3:
        raise DomainError(f"perfect manipulator tournaments need n >= 3, got {n}")
    for alpha in range(n):
        others = [v for v in range(n) if v != alpha]
        for mask in range(1, (1 << (n - 1)) - 1):
            B = tuple(v for i, v in enumerate(others) if (mask >> i) & 1)
            C = tuple(v for i, v in enumerate(others) if not (mask >> i) & 1)
            yield alpha, B, C


def enumerate_pm(n: int) -> Iterator[PerfectManipulatorSpec]:
    """Every perfect manipulator spec on n candidates exactly once."""
    for alpha, B, C in pm_groups(n):
        qb, qc = pair_count(len(B)), pair_count(len(C))
        for inner in range(1 << (qb + qc)):
            bits = format(inner, f"0{qb + qc}b") if qb + qc else ""
            yield PerfectManipulatorSpec(alpha, B, C, bits[:qb], bits[qb:])


def sample_pm(n: int, seed: int) -> PerfectManipulatorSpec:
    """
    alpha uniform, then each other vertex to B or C uniformly conditioned on
    both being nonempty, then uniform internal bits. Deterministic in seed.
    """
    if n < 3:
        raise DomainError(f"perfect manipulator tournaments need n >= 3, got {n}")
    rng = np.random.default_rng(seed)
    alpha = int(rng.integers(n))
    others = [v for v in range(n) if v != alpha]
    while True:
        sides = rng.integers(0, 2, size=n - 1)
        if 0 < sides.sum() < n - 1:
            break
    B = tuple(v for v, s in zip(others, sides) if s)
    C = tuple(v for v, s in zip(others, sides) if not s)
    inner = rng.integers(0, 2, size=pair_count(len(B)) + pair_count(len(C)))
    bits = "".join(str(int(b)) for b in inner)
    qb = pair_count(len(B))
    return PerfectManipulatorSpec(alpha, B, C, bits[:qb], bits[qb:])


def classes_to_spec(n: int, classes: Iterable[int], bits: Sequence[int]) -> PerfectManipulatorSpec:
    """Rebuild a spec from a class row and full orientation bits (inverse of realization)."""
    cls = list(classes)
    alpha = cls.index(CLASS_A)
    B = tuple(v for v in range(n) if cls[v] == CLASS_B)
    C = tuple(v for v in range(n) if cls[v] == CLASS_C)
    inner_b = "".join(str(int(bits[pair_index(n, u, v)])) for u, v in itertools.combinations(B, 2))
    inner_c = "".join(str(int(bits[pair_index(n, u, v)])) for u, v in itertools.combinations(C, 2))
    return PerfectManipulatorSpec(alpha, B, C, inner_b, inner_c)
