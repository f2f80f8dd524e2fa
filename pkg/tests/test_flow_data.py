"""Tests for flow category validation and simplicial structure."""

import pytest

from flowcat import ErrorCode, FlowDataError
from flowcat.flow_data import (
    _degeneracy,
    canonical_form,
    cone,
    diagonal,
    face,
    facet_sign,
    s0,
    sn,
    suspend,
    validate_flow_category,
    validate_flow_simplex,
)
from flowcat.models import (
    FacetLabel,
    FlowCategory,
    FlowObject,
    FlowSimplex,
    FormalComponent,
    MorphismCell,
    VirtualDim,
)
from flowcat.serialization import load_category


class TestValidateFlowCategory:
    """Axiom checks on formal flow categories."""

    def test_circle_is_valid(self, circle_category):
        assert validate_flow_category(circle_category).ok

    def test_interval_is_valid(self, interval_category):
        report = validate_flow_category(interval_category)

        assert report.ok
        assert report.violations == ()

    def test_missing_composite_is_reported(self, fixtures_dir):
        F = load_category(fixtures_dir / "broken_d2.json")

        report = validate_flow_category(F)

        assert not report.ok
        assert report.first.code == ErrorCode.FLOW_IDENTIFICATION
        assert report.first.location == ("a", "c")

    def test_wrong_dimension_is_a_framing_mismatch(self):
        F = FlowCategory(
            objects=(FlowObject(id="p", vdim=VirtualDim(plus=2)), FlowObject(id="q")),
            morphisms=(
                MorphismCell(
                    source="p",
                    target="q",
                    components=(FormalComponent(id="x", total_dim=0, count=1),),
                ),
            ),
        )

        report = validate_flow_category(F)

        assert report.first.code == ErrorCode.FLOW_FRAMING_MISMATCH

    def test_unknown_object(self, circle_category):
        F = circle_category.model_copy(
            update={
                "morphisms": (
                    MorphismCell(
                        source="e",
                        target="nowhere",
                        components=(FormalComponent(id="x", total_dim=0),),
                    ),
                )
            }
        )

        assert validate_flow_category(F).first.code == ErrorCode.INPUT_UNKNOWN_REFERENCE

    def test_endomorphisms_at_zero_energy_are_not_proper(self):
        F = FlowCategory(
            objects=(FlowObject(id="p"),),
            morphisms=(
                MorphismCell(
                    source="p",
                    target="p",
                    components=(FormalComponent(id="x", total_dim=0),),
                ),
            ),
        )

        codes = {v.code for v in validate_flow_category(F).violations}

        assert ErrorCode.FLOW_NOT_PROPER in codes

    def test_threads_do_not_change_the_report(self, fixtures_dir):
        F = load_category(fixtures_dir / "broken_d2.json")

        assert validate_flow_category(F, threads=4) == validate_flow_category(F)


class TestFacetSigns:
    @pytest.mark.parametrize(
        ("face", "label", "sign"),
        [
            ((0, 1), FacetLabel.breaking("q", 0), 1),
            ((0, 1), FacetLabel.breaking("q", 1), -1),
            ((0, 1, 2), FacetLabel.forgetting(1), 1),
            ((0, 2, 3), FacetLabel.forgetting(2), 1),
            ((0, 1, 2, 3), FacetLabel.forgetting(2), -1),
        ],
    )
    def test_position_rule(self, face, label, sign):
        assert facet_sign(face, label) == sign

    def test_break_label_needs_its_object(self):
        with pytest.raises(ValueError):
            FacetLabel(kind="break")


class TestSimplicialStructure:
    """Faces and outer degeneracies."""

    def test_diagonal_is_a_valid_bimodule(self, circle_category):
        B = diagonal(circle_category)

        assert B.left == circle_category
        assert B.right == circle_category
        assert validate_flow_simplex(B).ok

    def test_diagonal_carries_units_and_collars(self, circle_category):
        B = diagonal(circle_category)

        ids = {(c.source, c.target): [x.id for x in c.components] for c in B.middle()}
        assert ids[("e", "e")] == ["unit:e"]
        assert ids[("v", "v")] == ["unit:v"]
        assert sorted(ids[("e", "v")]) == ["path0~s", "path1~s"]

    @pytest.mark.parametrize("i", [0, 1])
    def test_faces_of_a_degeneracy(self, circle_category, i):
        B = diagonal(circle_category)

        assert canonical_form(face(s0(B), i)) == canonical_form(B)

    def test_face_of_diagonal_is_the_category(self, circle_category):
        B = diagonal(circle_category)

        assert canonical_form(face(B, 1)) == canonical_form(
            FlowSimplex.point(circle_category)
        )

    def test_face_out_of_range(self, circle_category):
        with pytest.raises(FlowDataError) as exc_info:
            face(FlowSimplex.point(circle_category), 0)

        assert exc_info.value.code == ErrorCode.FLOW_FACE_OUT_OF_RANGE

    def test_terminal_degeneracy_of_a_degenerate_simplex(self, circle_category):
        S = sn(diagonal(circle_category))

        assert S.dimension == 2
        assert canonical_form(face(S, 0)) == canonical_form(face(S, 1))

    def test_inner_degeneracies_are_rejected(self, circle_category):
        with pytest.raises(FlowDataError) as exc_info:
            _degeneracy(sn(diagonal(circle_category)), 1)

        assert exc_info.value.code == ErrorCode.FLOW_FACE_OUT_OF_RANGE


class TestSuspensionAndCone:
    def test_suspend_shifts_dimensions(self, circle_category):
        up = suspend(circle_category)
        down = suspend(circle_category, -1)

        assert [o.dim for o in up.objects] == [2, 1]
        assert up.objects[0].vdim == VirtualDim(plus=2)
        assert [o.dim for o in down.objects] == [0, -1]
        assert validate_flow_category(up).ok

    def test_suspend_rejects_other_signs(self, circle_category):
        with pytest.raises(FlowDataError) as exc_info:
            suspend(circle_category, 0)

        assert exc_info.value.code == ErrorCode.FLOW_MALFORMED

    def test_times_two_bimodule_is_valid(self, times2_bimodule):
        assert validate_flow_simplex(times2_bimodule).ok

    def test_cone_is_a_flow_category(self, times2_bimodule):
        data = cone(times2_bimodule)

        assert data.category.object_ids == ("X:e", "X:v", "Y:e", "Y:v")
        assert data.category.dim("X:e") == 2
        assert data.include.right == data.category
        assert data.project.left == data.category
        assert validate_flow_category(data.category).ok

    def test_cone_refuses_invalid_bimodules(self, times2_bimodule):
        broken = times2_bimodule.model_copy(update={"cells": times2_bimodule.cells[:1]})

        with pytest.raises(FlowDataError):
            cone(broken)
