"""Tests for bimodule composition and homotopies from 2-simplices."""

import pytest
import sympy

from flowcat import BimoduleError, ErrorCode, Ring
from flowcat.bimodule_alg import (
    chain_level_composite,
    compose_bimodules,
    homotopy_from_2simplex,
    null_homotopy_BP,
    null_homotopy_IB,
    null_homotopy_PI,
)
from flowcat.flow_data import canonical_form, diagonal
from flowcat.homology import chain_map


class TestCompose:
    """Composition over the middle category."""

    def test_diagonal_is_a_left_unit(self, circle_category, times2_bimodule):
        composite = compose_bimodules(diagonal(circle_category), times2_bimodule)

        assert canonical_form(composite.left) == canonical_form(circle_category)
        assert chain_map(composite) == chain_map(times2_bimodule)

    def test_composite_matches_the_matrix_product(self, times2_bimodule):
        composite = compose_bimodules(times2_bimodule, times2_bimodule)

        assert chain_map(composite) == chain_level_composite(
            times2_bimodule, times2_bimodule
        )
        assert chain_map(composite) == sympy.Matrix([[4, 0], [0, 1]])

    def test_point_components_are_multiplied(self, times2_bimodule):
        composite = compose_bimodules(times2_bimodule, times2_bimodule)

        cells = {(c.source, c.target): c for c in composite.middle()}
        ids = sorted(c.id for c in cells[("e", "e")].components)
        assert ids == ["phi0*phi0", "phi0*phi1", "phi1*phi0", "phi1*phi1"]

    def test_middle_mismatch(self, interval_category, times2_bimodule):
        with pytest.raises(BimoduleError) as exc_info:
            compose_bimodules(diagonal(interval_category), times2_bimodule)

        assert exc_info.value.code == ErrorCode.BIMODULE_MIDDLE_MISMATCH


class TestHomotopyFrom2Simplex:
    """Null-homotopies of the cone sequence."""

    def test_include_after_bimodule(self, times2_bimodule):
        result = homotopy_from_2simplex(null_homotopy_IB(times2_bimodule))

        assert result.f02 == sympy.zeros(2, 4)
        assert result.composite == sympy.Matrix([[0, 0, 2, 0], [0, 0, 0, 1]])
        assert result.homotopy == sympy.Matrix([[1, 0, 0, 0], [0, 1, 0, 0]])

    def test_shifted_bimodule_after_project(self, times2_bimodule):
        result = homotopy_from_2simplex(null_homotopy_BP(times2_bimodule))

        assert result.composite == sympy.Matrix([[2, 0], [0, 1], [0, 0], [0, 0]])

    def test_project_after_include_vanishes(self, times2_bimodule):
        result = homotopy_from_2simplex(null_homotopy_PI(times2_bimodule))

        assert result.composite == sympy.zeros(2, 2)
        assert result.homotopy == sympy.zeros(2, 2)

    @pytest.mark.parametrize("ring", [Ring.Z, Ring.Z2])
    def test_both_rings(self, times2_bimodule, ring):
        assert homotopy_from_2simplex(null_homotopy_IB(times2_bimodule), ring)

    def test_missing_top_cells_leave_a_residual(self, times2_bimodule):
        S = null_homotopy_IB(times2_bimodule)
        top_cells = tuple(c for c in S.cells if len(c.face) == 2)
        S = S.model_copy(update={"cells": top_cells})

        with pytest.raises(BimoduleError) as exc_info:
            homotopy_from_2simplex(S)

        assert exc_info.value.code == ErrorCode.BIMODULE_HOMOTOPY_RESIDUAL
        assert exc_info.value.location == ("e", "Y:e")

    def test_needs_a_2_simplex(self, times2_bimodule):
        with pytest.raises(BimoduleError) as exc_info:
            homotopy_from_2simplex(times2_bimodule)

        assert exc_info.value.code == ErrorCode.FLOW_MALFORMED
