"""
Arithmetic over F3 realized by voting trees.

On the two non-transitive tournaments over {0, 1, 2} every gate below
computes its F3 function regardless of orientation (the yield, pair and
first-half squaring gates are the exceptions and have per-direction tables).
Gates compose by substituting whole subtrees for their inputs, so shared
inputs stay shared DAG nodes.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd

from .errors import CompileError, DomainError
from .tournament import Direction
from .voting_tree import Bindings, TreeLike, Variable, VotingTree, as_tree, candidates, evaluate, match, node
from .constructions import against

logger = logging.getLogger(__name__)

MODULUS = 3


@dataclass(frozen=True)
class F3Element:
    """Element of F3 with automatic reduction mod 3."""
    value: int

    def __post_init__(self):
        object.__setattr__(self, "value", int(self.value) % MODULUS)

    def __add__(self, other: "F3Element | int") -> "F3Element":
        return F3Element(self.value + _coerce(other))

    def __radd__(self, other: int) -> "F3Element":
        return self + other

    def __sub__(self, other: "F3Element | int") -> "F3Element":
        return F3Element(self.value - _coerce(other))

    def __mul__(self, other: "F3Element | int") -> "F3Element":
        return F3Element(self.value * _coerce(other))

    def __rmul__(self, other: int) -> "F3Element":
        return self * other

    def __neg__(self) -> "F3Element":
        return F3Element(-self.value)

    def __pow__(self, exponent: int) -> "F3Element":
        return F3Element(pow(self.value, exponent, MODULUS))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, F3Element):
            return self.value == other.value
        if isinstance(other, int) and not isinstance(other, bool):
            return self.value == other % MODULUS
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.value)

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"F3({self.value})"

    @staticmethod
    def third(x: "F3Element", y: "F3Element") -> "F3Element":
        """The remaining element Z of two distinct elements; X + Y + Z = 0."""
        if x == y:
            raise DomainError("the third element needs two distinct inputs")
        return -(x + y)


def _coerce(value: "F3Element | int") -> int:
    return value.value if isinstance(value, F3Element) else value


# Expression AST

@dataclass(frozen=True)
class Const:
    value: F3Element

    def __str__(self) -> str:
        return str(self.value.value)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Neg:
    operand: "GateExpr"

    def __str__(self) -> str:
        return f"-({self.operand})"


@dataclass(frozen=True)
class Add:
    left: "GateExpr"
    right: "GateExpr"

    def __str__(self) -> str:
        return f"({self.left} + {self.right})"


@dataclass(frozen=True)
class Mul:
    left: "GateExpr"
    right: "GateExpr"

    def __str__(self) -> str:
        return f"({self.left} * {self.right})"


@dataclass(frozen=True)
class Square:
    operand: "GateExpr"

    def __str__(self) -> str:
        return f"({self.operand})^2"


GateExpr = Union[Const, Var, Neg, Add, Mul, Square]


def expr_variables(e: GateExpr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Const):
        return set()
    if isinstance(e, (Neg, Square)):
        return expr_variables(e.operand)
    return expr_variables(e.left) | expr_variables(e.right)


def evaluate_expr(e: GateExpr, assignment: Mapping[str, Union[int, F3Element]]) -> F3Element:
    """Direct F3 arithmetic, the oracle compiled trees are checked against."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        if e.name not in assignment:
            raise CompileError(f"no value for variable '{e.name}'")
        return F3Element(_coerce(assignment[e.name]))
    if isinstance(e, Neg):
        return -evaluate_expr(e.operand, assignment)
    if isinstance(e, Square):
        return evaluate_expr(e.operand, assignment) ** 2
    left = evaluate_expr(e.left, assignment)
    right = evaluate_expr(e.right, assignment)
    return left + right if isinstance(e, Add) else left * right


# Gates

def yield_gate(x: TreeLike) -> VotingTree:
    """The unique vertex beating x: x - 1 on clockwise, x + 1 on counterclockwise."""
    return against(x, [0, 1, 2])


def pair_gate(x: TreeLike, y: TreeLike) -> VotingTree:
    """-X-Y when the inputs differ; yield(X) when they agree."""
    return node(yield_gate(x), yield_gate(y))


def neg_sum(x: TreeLike, y: TreeLike) -> VotingTree:
    """-X-Y on both orientations."""
    both = pair_gate(x, y)
    return pair_gate(pair_gate(x, both), pair_gate(both, y))


def negate(x: TreeLike) -> VotingTree:
    return neg_sum(x, 0)


def add(x: TreeLike, y: TreeLike) -> VotingTree:
    return negate(neg_sum(x, y))


def square_first_half(x: TreeLike) -> VotingTree:
    """0->0, 1->2, 2->2 on clockwise; 0->2, 1->1, 2->1 on counterclockwise."""
    top = yield_gate(yield_gate(match(match(x, 1), 2)))
    bottom = yield_gate(match(match(x, 2), 1))
    return node(top, bottom)


def square_second_half(y: TreeLike) -> VotingTree:
    """1 - yield(yield(Y)): -Y on clockwise, 2 - Y on counterclockwise."""
    return add(1, negate(yield_gate(yield_gate(y))))


def square(x: TreeLike) -> VotingTree:
    return square_second_half(square_first_half(x))


def multiply(x: TreeLike, y: TreeLike) -> VotingTree:
    """XY through X^2 + Y^2 - (X+Y)^2 = -2XY = XY (mod 3)."""
    return add(square(x), add(square(y), negate(square(add(x, y)))))


@dataclass(frozen=True)
class Gate:
    name: str
    arity: int
    builder: Callable[..., VotingTree]
    oracle: Callable[..., int]  # (direction, *inputs) -> expected output

    def inputs(self) -> tuple[Variable, ...]:
        return GATE_INPUTS[:self.arity]

    def tree(self) -> VotingTree:
        return self.builder(*self.inputs())


def _yield_oracle(d: Direction, x: int) -> int:
    return (x - 1) % MODULUS if d is Direction.CLOCKWISE else (x + 1) % MODULUS


def _pair_oracle(d: Direction, x: int, y: int) -> int:
    return _yield_oracle(d, x) if x == y else (-x - y) % MODULUS


_FIRST_HALF = {
    Direction.CLOCKWISE: (0, 2, 2),
    Direction.COUNTERCLOCKWISE: (2, 1, 1),
}

GATE_INPUTS = (Variable("X"), Variable("Y"))

GATES: dict[str, Gate] = {
    gate.name: gate
    for gate in (
        Gate("yield", 1, yield_gate, _yield_oracle),
        Gate("pair", 2, pair_gate, _pair_oracle),
        Gate("neg_sum", 2, neg_sum, lambda d, x, y: (-x - y) % MODULUS),
        Gate("negate", 1, negate, lambda d, x: -x % MODULUS),
        Gate("add", 2, add, lambda d, x, y: (x + y) % MODULUS),
        Gate("square_first_half", 1, square_first_half, lambda d, x: _FIRST_HALF[d][x]),
        Gate("square_second_half", 1, square_second_half,
             lambda d, y: -y % MODULUS if d is Direction.CLOCKWISE else (2 - y) % MODULUS),
        Gate("square", 1, square, lambda d, x: x * x % MODULUS),
        Gate("multiply", 2, multiply, lambda d, x, y: x * y % MODULUS),
    )
}


# Compiler

def compile_expr(e: GateExpr, variables: Optional[Iterable[str]] = None) -> VotingTree:
    """
    Lower an expression through the gate constructors, bottom-up.
    Repeated sub-expressions compile once and end up as shared DAG nodes.

    Args:
        e: expression to compile
        variables: declared variable names; defaults to the expression's own
    Returns:
        a tree over candidates {0, 1, 2} and the expression's variables
    """
    declared = set(expr_variables(e) if variables is None else variables)
    cache: dict[GateExpr, VotingTree] = {}

    def lower(sub: GateExpr) -> VotingTree:
        if sub in cache:
            return cache[sub]
        if isinstance(sub, Const):
            tree = as_tree(sub.value.value)
        elif isinstance(sub, Var):
            if sub.name not in declared:
                raise CompileError(f"undeclared variable '{sub.name}'")
            tree = as_tree(Variable(sub.name))
        elif isinstance(sub, Neg):
            tree = negate(lower(sub.operand))
        elif isinstance(sub, Square):
            tree = square(lower(sub.operand))
        elif isinstance(sub, Add):
            tree = add(lower(sub.left), lower(sub.right))
        elif isinstance(sub, Mul):
            tree = multiply(lower(sub.left), lower(sub.right))
        else:
            raise CompileError(f"unknown expression node {sub!r}")
        cache[sub] = tree
        return tree

    return lower(e)


def eval_f3(t: VotingTree, d: Direction, assignment: Optional[Bindings] = None) -> F3Element:
    """Evaluate a gate tree on one of the two cyclic tournaments."""
    stray = {c for c in candidates(t) if c > 2}
    if stray:
        raise DomainError(f"F3 trees only use candidates 0, 1, 2; found {sorted(stray)}")
    return F3Element(evaluate(t, d.tournament, assignment))


def truth_table(t: VotingTree, variables: Sequence[str]) -> pd.DataFrame:
    """One row per (direction, assignment) with the tree's output."""
    rows = []
    for d in Direction:
        for values in itertools.product(range(MODULUS), repeat=len(variables)):
            assignment = dict(zip(variables, values))
            rows.append({"direction": d.value, **assignment, "output": eval_f3(t, d, assignment).value})
    return pd.DataFrame(rows, columns=["direction", *variables, "output"])


def random_expr(rng: np.random.Generator, variables: Sequence[str], depth: int) -> GateExpr:
    """Random expression of depth at most `depth` over the given variables."""
    if depth <= 0 or rng.random() < 0.2:
        if variables and rng.random() < 0.7:
            return Var(variables[int(rng.integers(len(variables)))])
        return Const(F3Element(int(rng.integers(MODULUS))))
    kind = int(rng.integers(4))
    if kind == 0:
        return Neg(random_expr(rng, variables, depth - 1))
    if kind == 1:
        return Square(random_expr(rng, variables, depth - 1))
    left = random_expr(rng, variables, depth - 1)
    right = random_expr(rng, variables, depth - 1)
    return Add(left, right) if kind == 2 else Mul(left, right)
