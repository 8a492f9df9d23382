import itertools

import numpy as np
import pytest

from ballotree.core.errors import CompileError, DomainError
from ballotree.core.expression_parser import parse_expression
from ballotree.core.f3_circuits import (
    GATES,
    Add,
    Const,
    F3Element,
    Mul,
    Square,
    Var,
    compile_expr,
    eval_f3,
    evaluate_expr,
    expr_variables,
    multiply,
    random_expr,
    square,
    truth_table,
    yield_gate,
)
from ballotree.core.tournament import Direction, transitive
from ballotree.core.voting_tree import evaluate, node, stats, substitute

CW = Direction.CLOCKWISE
CCW = Direction.COUNTERCLOCKWISE


def _table(tree, d, names):
    return {
        values: eval_f3(tree, d, dict(zip(names, values))).value
        for values in itertools.product(range(3), repeat=len(names))
    }


class TestF3Element:
    def test_reduction(self):
        assert F3Element(5) == 2
        assert F3Element(-1) == F3Element(2)
        assert int(F3Element(4)) == 1

    def test_arithmetic(self):
        assert F3Element(2) + 2 == 1
        assert F3Element(2) * F3Element(2) == 1
        assert -F3Element(1) == 2
        assert F3Element(1) - 2 == 2
        assert F3Element(2) ** 2 == 1

    def test_third(self):
        assert F3Element.third(F3Element(1), F3Element(2)) == 0
        assert F3Element.third(F3Element(0), F3Element(2)) == 1
        with pytest.raises(DomainError):
            F3Element.third(F3Element(1), F3Element(1))

    def test_hashable(self):
        assert len({F3Element(0), F3Element(3), F3Element(1)}) == 2


class TestGateTables:
    def test_yield(self):
        tree = yield_gate("X")
        assert _table(tree, CW, ["X"]) == {(0,): 2, (1,): 0, (2,): 1}
        assert _table(tree, CCW, ["X"]) == {(0,): 1, (1,): 2, (2,): 0}

    def test_yield_shape(self):
        assert yield_gate("X") is node(node(node("X", 0), node("X", 1)), node("X", 2))

    def test_square_first_half(self):
        tree = GATES["square_first_half"].tree()
        assert [eval_f3(tree, CW, {"X": x}).value for x in range(3)] == [0, 2, 2]
        assert [eval_f3(tree, CCW, {"X": x}).value for x in range(3)] == [2, 1, 1]

    def test_square_second_half(self):
        tree = GATES["square_second_half"].tree()
        assert [eval_f3(tree, CW, {"X": y}).value for y in range(3)] == [0, 2, 1]
        assert [eval_f3(tree, CCW, {"X": y}).value for y in range(3)] == [2, 1, 0]

    def test_pair_differs_from_yield_only_on_ties(self):
        tree = GATES["pair"].tree()
        for d in Direction:
            for x, y in itertools.product(range(3), repeat=2):
                got = eval_f3(tree, d, {"X": x, "Y": y}).value
                if x != y:
                    assert got == (-x - y) % 3

    @pytest.mark.parametrize("name", sorted(GATES))
    def test_every_gate_matches_its_oracle(self, name):
        gate = GATES[name]
        tree = gate.tree()
        names = [v.name for v in gate.inputs()]
        for d in Direction:
            for values in itertools.product(range(3), repeat=gate.arity):
                assert eval_f3(tree, d, dict(zip(names, values))).value == gate.oracle(d, *values)

    def test_arithmetic_gates_ignore_orientation(self):
        for name in ("neg_sum", "negate", "add", "square", "multiply"):
            tree = GATES[name].tree()
            names = [v.name for v in GATES[name].inputs()]
            assert _table(tree, CW, names) == _table(tree, CCW, names)

    @pytest.mark.parametrize("name", sorted(GATES))
    def test_subtree_substitution_commutes_with_evaluation(self, name):
        tree = GATES[name].tree()
        for replacement in (yield_gate("Y"), GATES["negate"].tree(), GATES["multiply"].tree()):
            closed = substitute(tree, "X", replacement)
            for d in Direction:
                for x, y in itertools.product(range(3), repeat=2):
                    bound = {"X": x, "Y": y}
                    inner = eval_f3(replacement, d, bound).value
                    assert eval_f3(closed, d, bound) == eval_f3(tree, d, {"X": inner, "Y": y})

    def test_sum_and_product_examples(self):
        add, mul = GATES["add"].tree(), GATES["multiply"].tree()
        for d in Direction:
            assert eval_f3(add, d, {"X": 1, "Y": 2}) == 0
            assert eval_f3(mul, d, {"X": 2, "Y": 2}) == 1

    def test_transitive_input_has_no_contract(self):
        # 0 beats everyone, so nothing yields to 0
        assert evaluate(yield_gate("X"), transitive(3), {"X": 0}) == 0

    def test_multiply_stays_small_as_a_dag(self):
        assert stats(multiply("X", "Y")).dag_nodes < 10 * stats(square("X")).dag_nodes


class TestCompiler:
    def test_constants_and_variables(self):
        assert eval_f3(compile_expr(Const(F3Element(2))), CW) == 2
        tree = compile_expr(Var("x"))
        assert eval_f3(tree, CCW, {"x": 1}) == 1

    def test_binomial_identity(self):
        lhs = compile_expr(parse_expression("x^2 + 2*x*y + y^2"))
        rhs = compile_expr(parse_expression("(x + y)^2"))
        for d in Direction:
            assert _table(lhs, d, ["x", "y"]) == _table(rhs, d, ["x", "y"])

    def test_cube_is_identity(self):
        tree = compile_expr(parse_expression("x^3"))
        for d in Direction:
            assert _table(tree, d, ["x"]) == {(0,): 0, (1,): 1, (2,): 2}

    def test_repeated_subexpressions_are_shared(self):
        inner = Add(Var("x"), Var("y"))
        shared = compile_expr(Mul(Square(inner), Square(inner)))
        distinct = compile_expr(Mul(Square(inner), Square(Add(Var("y"), Var("x")))))
        assert stats(shared).dag_nodes < stats(distinct).dag_nodes

    def test_undeclared_variable(self):
        with pytest.raises(CompileError, match="undeclared variable 'y'"):
            compile_expr(Add(Var("x"), Var("y")), variables=["x"])

    def test_eval_rejects_large_candidates(self):
        with pytest.raises(DomainError):
            eval_f3(node(0, 3), CW)

    def test_random_expressions_agree_with_arithmetic(self):
        rng = np.random.default_rng(0)
        names = ["x", "y", "z"]
        for _ in range(100):
            e = random_expr(rng, names, 4)
            tree = compile_expr(e, names)
            for d in Direction:
                for values in itertools.product(range(3), repeat=3):
                    assignment = dict(zip(names, values))
                    assert eval_f3(tree, d, assignment) == evaluate_expr(e, assignment)

    def test_substitution_commutes_with_evaluation(self):
        tree = compile_expr(parse_expression("x*y + 1"))
        for d in Direction:
            for x, y in itertools.product(range(3), repeat=2):
                closed = substitute(substitute(tree, "x", x), "y", y)
                assert eval_f3(closed, d) == eval_f3(tree, d, {"x": x, "y": y})

    def test_expr_variables(self):
        assert expr_variables(parse_expression("x*y - 2 + x")) == {"x", "y"}


class TestTruthTable:
    def test_shape(self):
        df = truth_table(GATES["add"].tree(), ["X", "Y"])
        assert len(df) == 18
        assert list(df.columns) == ["direction", "X", "Y", "output"]
        assert set(df["direction"]) == {"clockwise", "counterclockwise"}
        assert ((df["X"] + df["Y"]) % 3 == df["output"]).all()
