import itertools

import numpy as np
import pytest

from ballotree.core.batch import beats_from_bits, sample_pm_bits
from ballotree.core.errors import DomainError, FormatError, ScaleError
from ballotree.core.tournament import (
    CLASS_A,
    CLASS_B,
    Direction,
    PerfectManipulatorSpec,
    Tournament,
    classes_to_spec,
    enumerate_pm,
    enumerate_tournaments,
    make_tournament,
    pair_index,
    pairs,
    pm_count,
    pm_groups,
    random_tournament,
    realize_pm,
    sample_pm,
    tournament_count,
    transitive,
)


class TestEncoding:
    def test_pair_index_follows_lexicographic_order(self):
        for n in range(2, 8):
            for p, (u, v) in enumerate(pairs(n)):
                assert pair_index(n, u, v) == p
                assert pair_index(n, v, u) == p

    def test_pair_index_examples(self):
        assert pair_index(4, 0, 1) == 0
        assert pair_index(4, 0, 3) == 2
        assert pair_index(4, 1, 2) == 3
        assert pair_index(4, 2, 3) == 5

    def test_clockwise_bits(self, clockwise):
        """0 -> 1, 1 -> 2, 2 -> 0 is the bitstring 101."""
        assert clockwise.bits == "101"
        assert clockwise.code == 5
        assert clockwise.beats(0, 1)
        assert clockwise.beats(1, 2)
        assert clockwise.beats(2, 0)
        assert not clockwise.beats(1, 0)

    def test_counterclockwise_is_reversal(self, clockwise, counterclockwise):
        for u, v in itertools.permutations(range(3), 2):
            assert counterclockwise.beats(u, v) == clockwise.beats(v, u)

    def test_beats_is_reflexive(self):
        t = random_tournament(6, seed=3)
        assert all(t.beats(v, v) for v in range(6))

    def test_exactly_one_arc_per_pair(self):
        t = random_tournament(7, seed=11)
        for u, v in pairs(7):
            assert t.beats(u, v) != t.beats(v, u)

    def test_wrong_length_rejected(self):
        with pytest.raises(FormatError, match="expected 3 orientation bits"):
            make_tournament(3, "10")

    def test_bad_characters_rejected(self):
        with pytest.raises(FormatError, match="0/1"):
            make_tournament(3, "1a1")

    def test_out_of_range_candidate(self, clockwise):
        with pytest.raises(DomainError):
            clockwise.beats(0, 3)

    def test_text_round_trip(self):
        t = make_tournament(4, "011010")
        assert t.to_text() == "n=4\n011010\n"
        assert Tournament.from_text(t.to_text()) == t

    def test_from_text_requires_header(self):
        with pytest.raises(FormatError):
            Tournament.from_text("101\n")

    def test_single_vertex(self):
        t = make_tournament(1, "")
        assert t.bits == ""
        assert t.out_degrees() == [0]


class TestDegrees:
    def test_transitive_degrees(self):
        t = transitive(4)
        assert t.out_degrees() == [3, 2, 1, 0]
        assert t.copeland_winners() == frozenset({0})

    def test_cycle_is_regular(self, clockwise):
        assert clockwise.out_degrees() == [1, 1, 1]
        assert clockwise.copeland_winners() == frozenset({0, 1, 2})

    def test_matrix_matches_beats(self):
        t = random_tournament(5, seed=2)
        m = t.matrix()
        for u, v in itertools.product(range(5), repeat=2):
            assert m[u, v] == t.beats(u, v)

    def test_direction_enum_has_only_cyclic_tournaments(self):
        assert len(Direction) == 2
        assert {d.tournament.out_degrees()[0] for d in Direction} == {1}


class TestEnumeration:
    def test_counts_and_order(self):
        codes = [t.code for t in enumerate_tournaments(3)]
        assert codes == list(range(8))
        assert tournament_count(4) == 64

    def test_index_range(self):
        assert [t.bits for t in enumerate_tournaments(3, start=2, stop=4)] == ["010", "011"]

    def test_guard_refuses_large_n(self):
        with pytest.raises(ScaleError, match="exceeds the limit"):
            next(enumerate_tournaments(9))

    def test_force_lifts_guard(self):
        first = next(enumerate_tournaments(9, force=True))
        assert first.code == 0

    def test_env_overrides_limit(self, monkeypatch):
        monkeypatch.setenv("BALLOTREE_EXHAUSTIVE_LIMIT", "2")
        with pytest.raises(ScaleError):
            next(enumerate_tournaments(3))


class TestPerfectManipulator:
    def test_closed_form_counts(self):
        assert pm_count(3) == 6
        assert pm_count(4) == 48
        assert pm_count(8) == 4_644_864

    def test_enumeration_matches_count(self):
        specs = list(enumerate_pm(4))
        assert len(specs) == 48
        assert len({(s.alpha, s.B, s.inner_b + "|" + s.inner_c) for s in specs}) == 48

    def test_group_count(self):
        assert len(list(pm_groups(8))) == 8 * 126

    def test_realization_orients_classes(self):
        for spec in enumerate_pm(5):
            t = realize_pm(spec)
            assert all(t.beats(spec.alpha, b) and not t.beats(b, spec.alpha) for b in spec.B)
            assert all(t.beats(b, c) and not t.beats(c, b) for b in spec.B for c in spec.C)
            assert all(t.beats(c, spec.alpha) and not t.beats(spec.alpha, c) for c in spec.C)

    def test_realized_tournaments_can_coincide(self):
        """At n=3 every spec is a 3-cycle: six specs, two tournaments."""
        assert len({s.realize().code for s in enumerate_pm(3)}) == 2

    def test_inner_bits(self):
        spec = PerfectManipulatorSpec(alpha=1, B=(2, 3), C=(0,), inner_b="1", inner_c="")
        t = spec.realize()
        assert t.beats(2, 3)
        assert spec.class_of(0) == "C"
        assert spec.class_of(1) == "A"

    def test_text_round_trip(self):
        spec = PerfectManipulatorSpec(alpha=0, B=(3, 1), C=(2, 4), inner_b="0", inner_c="1")
        assert spec.B == (1, 3)
        assert spec.to_text() == "alpha=0; B=1,3; C=2,4; innerB=0; innerC=1"
        assert PerfectManipulatorSpec.from_text(spec.to_text()) == spec

    def test_from_text_missing_field(self):
        with pytest.raises(FormatError, match="missing innerC"):
            PerfectManipulatorSpec.from_text("alpha=0; B=1; C=2; innerB=")

    def test_not_a_partition(self):
        with pytest.raises(DomainError):
            PerfectManipulatorSpec(alpha=0, B=(1,), C=(3,))

    def test_empty_class(self):
        with pytest.raises(DomainError):
            PerfectManipulatorSpec(alpha=0, B=(1, 2), C=())

    def test_classes_to_spec_inverts_realization(self):
        for spec in enumerate_pm(4):
            assert classes_to_spec(4, spec.classes(), spec.realize().bits) == spec

    def test_sampling_is_deterministic(self):
        assert sample_pm(8, seed=42) == sample_pm(8, seed=42)
        spec = sample_pm(16, seed=1)
        assert spec.n == 16
        assert spec.B and spec.C

    def test_sampled_manipulator_beats_exactly_b(self):
        for seed in range(2000):
            spec = sample_pm(16, seed=seed)
            assert spec.realize().out_degree(spec.alpha) == len(spec.B)

    def test_batch_samples_manipulator_beats_exactly_b(self):
        bits, classes = sample_pm_bits(np.random.default_rng([0, 0]), 10_000, 16)
        beats = beats_from_bits(bits, 16)
        rows = np.arange(len(bits))
        alpha = np.argmax(classes == CLASS_A, axis=1)
        out_degree = beats[rows, alpha].sum(axis=1) - 1
        assert (out_degree == (classes == CLASS_B).sum(axis=1)).all()

    def test_too_small(self):
        with pytest.raises(DomainError):
            list(pm_groups(2))
