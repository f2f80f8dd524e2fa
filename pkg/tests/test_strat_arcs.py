"""Tests for labelled arcs and their stratifying categories."""

from fractions import Fraction

import pytest

from flowcat import ArcError, ErrorCode
from flowcat.corner_model import is_corner_model
from flowcat.strat_arcs import (
    RATIONAL_GAMMA,
    Arc,
    ArcCategory,
    arc_corner_category,
    block_functor,
    check_face_identities,
    collapse,
    compose_arcs,
    degenerate_sequence,
    horn_category,
    horn_membership,
    morphisms_into,
    relabel_degenerate,
)

THREE = (("a",), ("b",), ("c",))
FOUR = (("a",), ("b",), ("c",), ("d",))


def minimal(m: int, e: str, ell: int, f: str) -> Arc:
    return Arc.minimal((m, e), (ell, f))


class TestArc:
    """Construction, codimension and printing of arcs."""

    def test_minimal_arc_has_codim_zero(self):
        arc = minimal(0, "a", 3, "d")

        assert arc.codim == 0
        assert arc.vertices[0].indices == frozenset({1, 2})

    def test_codim_counts_edges_and_missing_indices(self):
        broken = Arc.build([(0, "a"), (1, "b"), (2, "c")], [[], []])
        forgotten = Arc.build([(0, "a"), (3, "d")], [[1]])
        both = Arc.build([(0, "a"), (1, "b"), (3, "d")], [[], []])

        assert broken.codim == 1
        assert forgotten.missing() == frozenset({2})
        assert forgotten.codim == 1
        assert both.codim == 2

    def test_str(self):
        arc = Arc.build([(0, "a"), (2, "c")], [[1]], [Fraction(1, 2)])

        assert str(arc) == "0:a-{1}@1/2-2:c"

    @pytest.mark.parametrize(
        ("edges", "labels"),
        [
            ([(0, "a")], []),
            ([(1, "b"), (0, "a")], [[]]),
            ([(0, "a"), (1, "b")], [[1]]),
            ([(0, "a"), (2, "c")], [[], []]),
        ],
    )
    def test_invalid_arcs(self, edges, labels):
        with pytest.raises(ArcError) as exc_info:
            Arc.build(edges, labels)

        assert exc_info.value.code == ErrorCode.ARC_INVALID

    def test_compose_adds_an_internal_edge(self):
        arc = compose_arcs(minimal(0, "a", 1, "b"), minimal(1, "b", 2, "c"))

        assert arc.internal_edges == ((1, "b"),)
        assert arc.codim == 1

    def test_compose_endpoint_mismatch(self):
        with pytest.raises(ArcError) as exc_info:
            compose_arcs(minimal(0, "a", 1, "b"), minimal(2, "c", 3, "d"))

        assert exc_info.value.code == ErrorCode.ARC_ENDPOINT_MISMATCH


class TestCollapse:
    """Collapsing internal edges coarsens an arc."""

    def test_collapse_forces_the_lost_index(self):
        arc = Arc.build([(0, "a"), (1, "b"), (2, "c")], [[], []])

        assert collapse(arc, [1]) == minimal(0, "a", 2, "c")

    def test_collapse_adds_energies(self):
        arc = Arc.build([(0, "a"), (1, "b"), (2, "c")], [[], []], [1, Fraction(1, 2)])

        assert collapse(arc, [1]).vertices[0].energy == Fraction(3, 2)

    def test_label_missing_forced_index(self):
        arc = Arc.build([(0, "a"), (1, "b"), (2, "c")], [[], []])

        with pytest.raises(ArcError) as exc_info:
            collapse(arc, [1], {0: []})

        assert exc_info.value.code == ErrorCode.ARC_COLLAPSE_FORCED

    def test_label_dropping_merged_labels(self):
        arc = Arc.build([(0, "a"), (1, "b"), (3, "d")], [[], [2]])

        with pytest.raises(ArcError) as exc_info:
            collapse(arc, [1], {0: [1]})

        assert exc_info.value.code == ErrorCode.ARC_COLLAPSE_UNION

    def test_only_internal_edges_collapse(self):
        arc = Arc.build([(0, "a"), (1, "b"), (2, "c")], [[], []])

        with pytest.raises(ArcError):
            collapse(arc, [0])

    def test_arrows_into_form_a_boolean_lattice(self):
        target = Arc.build([(0, "a"), (1, "b"), (3, "d")], [[], []])

        morphisms = morphisms_into(target)

        assert len(morphisms) == 4
        assert sorted(m.source.codim for m in morphisms) == [0, 1, 1, 2]
        assert sum(m.is_identity for m in morphisms) == 1


class TestArcCategory:
    """Enumeration, codim-1 strata and faces."""

    def test_codim_zero_objects_are_minimal_arcs(self):
        arcs = ArcCategory(THREE).enumerate_objects(0)

        assert len(arcs) == 6
        assert all(arc.codim == 0 for arc in arcs)

    def test_enumeration_is_bounded(self):
        with pytest.raises(ArcError) as exc_info:
            ArcCategory(THREE).enumerate_objects(None)

        assert exc_info.value.code == ErrorCode.ARC_UNBOUNDED_ENUMERATION

    def test_rational_gamma_needs_decompositions(self):
        C = ArcCategory(THREE, RATIONAL_GAMMA, (0, "a"), (1, "b"), grade=1)

        with pytest.raises(ArcError) as exc_info:
            C.enumerate_objects(1)

        assert exc_info.value.code == ErrorCode.ARC_UNBOUNDED_ENUMERATION

    def test_trivial_gamma_has_only_grade_zero(self):
        with pytest.raises(ArcError) as exc_info:
            ArcCategory(THREE, grade=1)

        assert exc_info.value.code == ErrorCode.ARC_ENERGY_MISMATCH

    def test_codim1_strata(self):
        strata = ArcCategory(THREE).enumerate_codim1((0, "a"), (2, "c"))

        breaks = sorted(s.through for s in strata if s.kind == "break")
        forgets = [s.index for s in strata if s.kind == "forget_vertex"]
        assert breaks == [(0, "a"), (1, "b"), (2, "c")]
        assert forgets == [1]
        assert {s.normal_sign for s in strata} == {"Q-", "Q+"}

    def test_codim1_strata_match_brute_force(self):
        C = ArcCategory(FOUR, source=(0, "a"), target=(3, "d"))

        strata = {s.arc for s in C.enumerate_codim1()}
        brute = {arc for arc in C.enumerate_objects(1) if arc.codim == 1}

        assert strata == brute
        assert len(strata) == 6

    def test_rational_energies(self):
        C = ArcCategory(
            THREE,
            RATIONAL_GAMMA,
            (0, "a"),
            (1, "b"),
            grade=1,
            energy_decompositions=[(Fraction(1, 2), Fraction(1, 2))],
        )

        arcs = C.enumerate_objects(1)

        assert len(arcs) == 3
        assert all(arc.grade == 1 for arc in arcs)
        assert all(C.contains(arc) for arc in arcs)

    def test_face_drops_a_set(self):
        face, inclusion = ArcCategory(THREE).face(1)
        arc = Arc.minimal((0, "a"), (1, "c"))

        image = inclusion.map_arc(arc)

        assert face.sequence == (("a",), ("c",))
        assert image.edges == ((0, "a"), (2, "c"))
        assert image.codim == 1
        assert inclusion.shift_of(image) == 1

    def test_face_out_of_range(self):
        with pytest.raises(ArcError) as exc_info:
            ArcCategory(THREE).face(5)

        assert exc_info.value.code == ErrorCode.ARC_FACE_OUT_OF_RANGE

    def test_face_identities(self):
        assert check_face_identities(ArcCategory(FOUR), 1) == []

    def test_bounded_category_is_a_corner_model(self):
        C = arc_corner_category(ArcCategory(THREE), 2)

        assert is_corner_model(C).ok


class TestHorn:
    """Horn membership and the block functor."""

    def test_full_and_punctured_labels_are_excluded(self):
        assert not horn_membership(Arc.minimal((0, "a"), (2, "c")), 1, 2)
        assert not horn_membership(Arc.build([(0, "a"), (2, "c")], [[]]), 1, 2)

    def test_broken_arc_lies_in_the_horn(self):
        arc = Arc.build([(0, "a"), (1, "b"), (2, "c")], [[], []])

        assert horn_membership(arc, 1, 2)

    def test_outer_horn_index_rejected(self):
        with pytest.raises(ArcError) as exc_info:
            horn_membership(Arc.minimal((0, "a"), (2, "c")), 0, 2)

        assert exc_info.value.code == ErrorCode.ARC_FACE_OUT_OF_RANGE

    @pytest.mark.parametrize(
        ("arc", "expected"),
        [
            (Arc.minimal((0, "a"), (2, "c")), (0, 0)),
            (Arc.build([(0, "a"), (2, "c")], [[]]), (0, 1)),
            (Arc.build([(0, "a"), (1, "b"), (2, "c")], [[], []]), (1, 0)),
        ],
    )
    def test_block_functor(self, arc, expected):
        d, epsilon = block_functor(arc, 1, 2, strict=False)

        assert (d, epsilon) == expected
        assert d + epsilon == arc.codim

    def test_block_functor_on_a_horn_arc(self):
        arc = Arc.build([(0, "a"), (1, "b"), (2, "c")], [[], []])

        assert block_functor(arc, 1, 2) == (1, 0)

    def test_block_functor_rejects_non_horn_arcs(self):
        with pytest.raises(ArcError) as exc_info:
            block_functor(Arc.minimal((0, "a"), (2, "c")), 1, 2)

        assert exc_info.value.code == ErrorCode.ARC_NOT_HORN_OBJECT

    def test_horn_category_omits_excluded_arcs(self):
        C = ArcCategory(THREE, source=(0, "a"), target=(2, "c"))

        horn = horn_category(C, 1, 2)

        assert Arc.minimal((0, "a"), (2, "c")) not in horn.objects
        assert all(horn_membership(arc, 1, 2) for arc in horn.objects)


class TestDegeneracy:
    def test_degenerate_sequence_repeats_a_set(self):
        assert degenerate_sequence(THREE, 0) == (("a",), ("a",), ("b",), ("c",))

    @pytest.mark.parametrize("j", [0, 1, 2])
    def test_relabel_keeps_codim(self, j):
        arcs = ArcCategory(THREE).enumerate_objects(2)

        for arc in arcs:
            assert relabel_degenerate(arc, j).codim == arc.codim

    def test_relabel_fills_the_new_index(self):
        arc = relabel_degenerate(Arc.minimal((0, "a"), (1, "b")), 0)

        assert arc.edges == ((0, "a"), (2, "b"))
        assert arc.vertices[0].indices == frozenset({1})


@pytest.mark.slow
def test_exhaustive_face_identities_and_models():
    C = ArcCategory(FOUR)

    assert check_face_identities(C, 3) == []
    assert is_corner_model(arc_corner_category(C, 3)).ok
