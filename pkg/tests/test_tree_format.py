import numpy as np
import pytest

from ballotree.core.constructions import omega, psi
from ballotree.core.errors import ParseError
from ballotree.core.tree_format import parse, serialize
from ballotree.core.voting_tree import ShapePolicy, combine, leaf, match, node


class TestParse:
    def test_match(self):
        assert parse("(0 1)") is match(0, 1)

    def test_variables_and_comments(self):
        text = "; a comment\n((X 0)\n (1 Y))  ; trailing\n"
        assert parse(text) is node(node("X", 0), node(1, "Y"))

    def test_single_leaf(self):
        assert parse("7\n") is leaf(7)

    def test_definitions(self):
        text = "(def @0 (0 1))\n(def @1 (@0 2))\n(@1 @0)\n"
        shared = node(0, 1)
        assert parse(text) is node(node(shared, 2), shared)

    def test_unclosed(self):
        with pytest.raises(ParseError, match="expected a subtree, reached end of input") as err:
            parse("(1")
        assert err.value.position == 2

    def test_three_children(self):
        with pytest.raises(ParseError, match="expected '\\)'") as err:
            parse("(0 1 2)")
        assert err.value.position == 5

    def test_undefined_reference(self):
        with pytest.raises(ParseError, match="undefined @a"):
            parse("(@a 1)")

    def test_bad_leaf(self):
        with pytest.raises(ParseError, match="bad leaf label") as err:
            parse("(0 1a)")
        assert err.value.position == 3

    def test_trailing_input(self):
        with pytest.raises(ParseError, match="trailing"):
            parse("(0 1) 2")

    def test_caret_annotation(self):
        with pytest.raises(ParseError) as err:
            parse("(0 1 2)")
        assert err.value.annotate().splitlines()[-1] == "       ^"


class TestSerialize:
    def test_expanded(self):
        assert serialize(node(node(0, "X"), 2), share=False) == "((0 X) 2)\n"

    def test_shared_form(self):
        shared = node(0, 1)
        assert serialize(node(shared, shared), share=True) == "(def @0 (0 1))\n(@0 @0)\n"

    def test_threshold_from_config(self):
        assert "(def" not in serialize(psi(4))
        assert serialize(omega(4)).startswith("(def @0")

    def test_explicit_threshold(self):
        shared = node(0, 1)
        assert serialize(node(shared, shared), threshold=3).startswith("(def")
        assert serialize(node(shared, shared), threshold=4) == "((0 1) (0 1))\n"

    def test_round_trip_random_trees(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            size = int(rng.integers(1, 24))
            labels = [int(x) if x < 6 else "XYZ"[x - 6] for x in rng.integers(0, 9, size=size)]
            tree = combine(labels, ShapePolicy.RANDOM, rng)
            assert parse(serialize(tree, share=False)) is tree
            assert parse(serialize(tree, share=True)) is tree

    def test_round_trip_deep_caterpillar(self):
        tree = combine(list(range(3)) * 700, ShapePolicy.CATERPILLAR)
        assert tree.depth == 2099
        assert parse(serialize(tree, share=False)) is tree

    def test_reserved_variable_name(self):
        with pytest.raises(ParseError, match="only allowed at the top level"):
            parse("(X def)")

    def test_round_trip_large_construction(self):
        tree = omega(3)
        assert parse(serialize(tree, share=True)) is tree
