"""Tests for chain complexes, chain maps and the long exact sequence."""

import pytest
import sympy

from flowcat import ErrorCode, HomologyError, Ring
from flowcat.flow_data import cone, diagonal, suspend
from flowcat.homology import (
    HomologyGroup,
    chain_complex,
    chain_homotopy,
    chain_map,
    check_chain_map,
    cone_isomorphism,
    homology,
    induced_map,
    les_check,
    mapping_cone,
)
from flowcat.serialization import load_category


class TestHomologyGroups:
    @pytest.mark.parametrize(
        ("group", "text"),
        [
            (HomologyGroup(Ring.Z), "0"),
            (HomologyGroup(Ring.Z, 1), "Z"),
            (HomologyGroup(Ring.Z, 2, (2,)), "Z^2 + Z/2"),
            (HomologyGroup(Ring.Z, 0, (2, 4)), "Z/2 + Z/4"),
            (HomologyGroup(Ring.Z2, 1), "Z/2"),
            (HomologyGroup(Ring.Z2, 3), "(Z/2)^3"),
        ],
    )
    def test_str(self, group, text):
        assert str(group) == text


class TestChainComplex:
    """Point counts as differentials."""

    def test_circle(self, circle_category):
        C = chain_complex(circle_category)

        assert C.ids == ["e", "v"]
        assert C.differential == sympy.zeros(2, 2)
        assert homology(C).as_strings() == {0: "Z", 1: "Z"}

    def test_interval(self, interval_category):
        result = homology(chain_complex(interval_category))

        assert result.as_strings() == {0: "Z", 1: "0"}

    def test_suspension_shifts_homology(self, circle_category):
        result = homology(chain_complex(suspend(circle_category)))

        assert result.as_strings() == {1: "Z", 2: "Z"}

    def test_mod_two(self, circle_category):
        result = homology(chain_complex(circle_category, Ring.Z2))

        assert result.as_strings() == {0: "Z/2", 1: "Z/2"}

    def test_differential_must_square_to_zero(self, fixtures_dir):
        F = load_category(fixtures_dir / "broken_d2.json")

        with pytest.raises(HomologyError) as exc_info:
            chain_complex(F)

        assert exc_info.value.code == ErrorCode.HOMOLOGY_DIFFERENTIAL_SQUARE
        assert exc_info.value.location == ("a", "c")


class TestChainMaps:
    """Bimodules induce chain maps."""

    def test_diagonal_is_the_identity(self, circle_category):
        assert chain_map(diagonal(circle_category)) == sympy.eye(2)

    def test_times_two(self, times2_bimodule):
        assert chain_map(times2_bimodule) == sympy.Matrix([[2, 0], [0, 1]])

    def test_residual_location(self, interval_category):
        X = chain_complex(interval_category)
        f = sympy.zeros(3, 3)
        f[0, 0] = 1

        with pytest.raises(HomologyError) as exc_info:
            check_chain_map(f, X, X)

        assert exc_info.value.code == ErrorCode.HOMOLOGY_CHAIN_MAP_RESIDUAL
        assert exc_info.value.location == ("e", "a")

    def test_induced_maps(self, circle_category, times2_bimodule):
        X = chain_complex(circle_category)

        assert induced_map(sympy.eye(2), X, X).isomorphism
        assert not induced_map(chain_map(times2_bimodule), X, X).isomorphism

    def test_ring_mismatch(self, circle_category):
        X = chain_complex(circle_category)
        Y = chain_complex(circle_category, Ring.Z2)

        with pytest.raises(HomologyError) as exc_info:
            mapping_cone(sympy.eye(2), X, Y)

        assert exc_info.value.code == ErrorCode.HOMOLOGY_RING_MISMATCH


class TestChainHomotopy:
    def test_collapsing_the_interval(self, interval_category):
        X = chain_complex(interval_category)
        collapse = sympy.Matrix([[0, 0, 0], [0, 1, 0], [0, 1, 0]])

        H = chain_homotopy(sympy.eye(3), collapse, X, X)

        assert X.differential * H + H * X.differential == sympy.eye(3) - collapse

    def test_identity_is_not_null_homotopic(self, circle_category):
        X = chain_complex(circle_category)

        with pytest.raises(HomologyError) as exc_info:
            chain_homotopy(sympy.eye(2), sympy.zeros(2, 2), X, X)

        assert exc_info.value.code == ErrorCode.HOMOLOGY_NO_SOLUTION


class TestCone:
    """The geometric cone matches the algebraic one."""

    def test_cone_complex_is_the_mapping_cone(self, times2_bimodule):
        X = chain_complex(times2_bimodule.left)
        Y = chain_complex(times2_bimodule.right)
        geometric = chain_complex(cone(times2_bimodule).category)

        algebraic = mapping_cone(chain_map(times2_bimodule), X, Y)

        assert [g.degree for g in algebraic.basis] == [2, 1, 1, 0]
        assert cone_isomorphism(geometric, algebraic) == sympy.eye(4)

    def test_les_over_z(self, times2_bimodule):
        report = les_check(times2_bimodule)

        assert report.ok
        assert [spot.name for spot in report.spots] == ["H(Y)", "H(C)", "H(SX)"]
        assert report.homology["C"] == {0: "0", 1: "Z/2", 2: "0"}
        assert report.homology["X"] == {0: "Z", 1: "Z"}

    def test_les_over_z2(self, times2_bimodule):
        report = les_check(times2_bimodule, Ring.Z2, threads=2)

        assert report.ok
        assert report.homology["C"] == {0: "0", 1: "Z/2", 2: "Z/2"}

    def test_les_report_dict(self, times2_bimodule):
        data = les_check(times2_bimodule).to_dict()

        assert data["ok"] is True
        assert data["ring"] == "Z"
        assert data["homology"]["C"]["1"] == "Z/2"
