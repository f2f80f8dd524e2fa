"""Tests for categories with corners and the corner-model criterion."""

import pytest

from flowcat import CornerModelError, ErrorCode
from flowcat.corner_model import (
    Arrow,
    CornerCategory,
    check_decomposition_coherence,
    check_model_morphism,
    decompose_arrow,
    face_poset,
    is_corner_model,
    overcategory,
    q_set,
)


def poset(codim: dict, leq: list) -> CornerCategory:
    return CornerCategory.from_poset(codim, leq, codim)


class TestFacePoset:
    """Faces of a simplex form a corner model."""

    @pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
    def test_face_poset_is_a_model(self, n):
        assert is_corner_model(face_poset(n)).ok

    def test_codimension_counts_missing_vertices(self):
        C = face_poset(2)

        assert C.codim((0, 1, 2)) == 0
        assert C.codim((0, 2)) == 1
        assert C.codim((1,)) == 2

    def test_arrows_point_to_subfaces(self):
        C = face_poset(2)

        assert C.hom((0, 1, 2), (0,)) == (Arrow((0, 1, 2), (0,)),)
        assert C.hom((0,), (0, 1, 2)) == ()

    def test_overcategory_of_a_vertex_is_a_square(self):
        over = overcategory(face_poset(2), (0,))

        assert sorted(over.codim(f) for f in over.objects) == [0, 1, 1, 2]

    @pytest.mark.parametrize(("face", "size"), [((0, 1, 2), 0), ((0, 1), 1), ((2,), 2)])
    def test_q_set_size_is_codim(self, face, size):
        assert len(q_set(face_poset(2), face)) == size

    def test_unknown_object(self):
        with pytest.raises(CornerModelError) as exc_info:
            face_poset(1).codim((5,))

        assert exc_info.value.code == ErrorCode.CORNER_UNKNOWN_OBJECT


class TestNonModels:
    """Categories failing the power-set criterion."""

    def test_missing_intermediate_stratum(self):
        C = poset({"a": 0, "b": 2}, [("a", "b")])

        report = is_corner_model(C)

        assert not report.ok
        assert report.first.code == ErrorCode.CORNER_RANK_MISMATCH
        assert report.first.location == ("b",)

    def test_q_set_of_a_non_model_raises(self):
        C = poset({"a": 0, "b": 2}, [("a", "b")])

        with pytest.raises(CornerModelError) as exc_info:
            q_set(C, "b")

        assert exc_info.value.code == ErrorCode.CORNER_NOT_A_MODEL

    def test_codim_must_increase(self):
        C = poset({"a": 1, "b": 1}, [("a", "b")])

        report = is_corner_model(C)

        assert report.first.code == ErrorCode.CORNER_NOT_FUNCTORIAL
        assert report.first.location == ("a", "b")

    def test_interval_is_a_model(self):
        C = poset({"I": 0, "0": 1, "1": 1}, [("I", "0"), ("I", "1")])

        assert is_corner_model(C).ok

    def test_unknown_arrow_endpoint(self):
        with pytest.raises(CornerModelError) as exc_info:
            CornerCategory(["a"], {"a": 0}, [Arrow("a", "z")])

        assert exc_info.value.code == ErrorCode.CORNER_UNKNOWN_OBJECT


class TestArrowDecomposition:
    def test_edge_to_vertex_adds_one_direction(self):
        C = face_poset(2)
        alpha = Arrow((0, 1), (0,))

        split = decompose_arrow(C, alpha)

        assert len(split.own) == 1
        assert len(split.relative) == 1
        assert split.image() == q_set(C, (0,)).elements

    def test_coherence_along_a_chain(self):
        C = face_poset(2)

        assert check_decomposition_coherence(
            C, Arrow((0, 1, 2), (0, 1)), Arrow((0, 1), (0,))
        )

    def test_coherence_in_a_tetrahedron(self):
        C = face_poset(3)

        assert check_decomposition_coherence(
            C, Arrow((0, 1, 2), (0, 1)), Arrow((0, 1), (1,))
        )

    def test_unknown_arrow(self):
        with pytest.raises(CornerModelError) as exc_info:
            decompose_arrow(face_poset(1), Arrow((0,), (0, 1)))

        assert exc_info.value.code == ErrorCode.CORNER_UNKNOWN_ARROW


class TestModelMorphism:
    """Face inclusions shift codimension by one."""

    @staticmethod
    def edge_into_triangle():
        C = face_poset(1)
        D = face_poset(2)
        object_map = {face: face for face in C.objects}
        arrow_map = {a: Arrow(a.source, a.target) for a in C.arrows}
        return object_map, arrow_map, C, D

    def test_face_inclusion(self):
        object_map, arrow_map, C, D = self.edge_into_triangle()

        assert check_model_morphism(object_map, arrow_map, C, D, shift=1).ok

    def test_wrong_shift(self):
        object_map, arrow_map, C, D = self.edge_into_triangle()

        report = check_model_morphism(object_map, arrow_map, C, D, shift=0)

        assert report.first.code == ErrorCode.CORNER_NOT_A_MODEL_MORPHISM

    def test_non_injective_object_map(self):
        object_map, arrow_map, C, D = self.edge_into_triangle()
        object_map[(1,)] = (0,)

        report = check_model_morphism(object_map, arrow_map, C, D, shift=1)

        assert not report.ok
