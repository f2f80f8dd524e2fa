"""Tests for L-blocks and conic degenerations."""

from fractions import Fraction

import pytest

from flowcat import ErrorCode, GeometryError
from flowcat.constants import LBlockFacetTag
from flowcat.degeneration_geom import (
    INFINITE_END,
    ZERO_END,
    LBlock,
    boundary_tags,
    coface,
    compatibility_square,
    conic_boundary_strata,
    conic_contains,
    conic_fiber,
    cosimplicial_check,
    embed_left,
    expected_facet_count,
    face_witness,
    lblock_contains,
    lblock_facets,
    normalize_pair,
)

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


class TestLBlock:
    """Membership and facets of L-blocks."""

    def test_flat_block(self):
        L = LBlock(2, 0)

        assert lblock_contains(L, (HALF, HALF))
        assert lblock_contains(L, ("1", "1/2"))
        assert not lblock_contains(L, (1, 1))

    def test_flagged_block(self):
        L = LBlock(1, 1)

        assert lblock_contains(L, (QUARTER, HALF))
        assert lblock_contains(L, (HALF, 1))
        assert not lblock_contains(L, (1, 1))

    def test_zero_dimensional_blocks_are_empty(self):
        assert LBlock(0, 0).is_empty
        assert LBlock(0, 1).is_empty
        assert not LBlock(1, 0).is_empty

    @pytest.mark.parametrize("epsilon", [0, 1, Fraction(3, 2), "-1/2"])
    def test_invalid_epsilon(self, epsilon):
        with pytest.raises(GeometryError) as exc_info:
            LBlock(2, 0, epsilon)

        assert exc_info.value.code == ErrorCode.GEOMETRY_INVALID_EPSILON

    def test_dimension_mismatch(self):
        with pytest.raises(GeometryError) as exc_info:
            lblock_contains(LBlock(2, 0), (HALF,))

        assert exc_info.value.code == ErrorCode.GEOMETRY_DIMENSION_MISMATCH

    def test_coordinate_range(self):
        with pytest.raises(GeometryError) as exc_info:
            lblock_contains(LBlock(2, 0), (2, 0))

        assert exc_info.value.code == ErrorCode.GEOMETRY_COORDINATE_RANGE

    @pytest.mark.parametrize(
        ("d", "flag", "count"),
        [(0, 0, 0), (0, 1, 0), (1, 0, 2), (1, 1, 3), (2, 0, 5), (2, 1, 6)],
    )
    def test_facet_counts(self, d, flag, count):
        assert len(lblock_facets(d, flag)) == count
        assert expected_facet_count(d, flag) == count

    def test_x_one_facets_glue_to_smaller_blocks(self):
        targets = {f.target for f in lblock_facets(3, 1) if f.target is not None}

        assert targets == {(2, 1), (3, 0)}

    def test_interior_point_has_no_tags(self):
        assert boundary_tags(LBlock(2, 0), (QUARTER, QUARTER)) == []

    def test_corner_point_tags(self):
        tags = {(f.tag, f.coordinate) for f in boundary_tags(LBlock(2, 0), (0, 1))}

        assert tags == {(LBlockFacetTag.X_ZERO, 0), (LBlockFacetTag.X_ONE, 1)}


class TestFaceWitness:
    @pytest.mark.parametrize("flag", [0, 1])
    def test_zero_faces(self, flag):
        L = LBlock(3, flag)

        point = face_witness(L, [0, 2])

        assert point is not None
        assert {f.coordinate for f in boundary_tags(L, point)} == {0, 2}

    @pytest.mark.parametrize(("d", "flag"), [(1, 0), (2, 0), (3, 0), (2, 1)])
    def test_hypersurface(self, d, flag):
        L = LBlock(d, flag)

        point = face_witness(L, [], hypersurface=True)

        assert point is not None
        assert [f.tag for f in boundary_tags(L, point)] == [
            LBlockFacetTag.HYPERSURFACE
        ]

    def test_empty_block_has_no_witness(self):
        assert face_witness(LBlock(0, 0), []) is None


class TestCosimplicial:
    """Coordinate-one inclusions form a cosimplicial object."""

    def test_coface_inserts_a_one(self):
        assert coface((HALF, QUARTER), 1) == (HALF, Fraction(1), QUARTER)

    @pytest.mark.parametrize("epsilon", [HALF, Fraction(1, 3)])
    def test_check_passes(self, epsilon):
        assert cosimplicial_check(3, epsilon, grid_steps=3).ok

    def test_check_is_bounded(self):
        with pytest.raises(GeometryError) as exc_info:
            cosimplicial_check(7)

        assert exc_info.value.code == ErrorCode.GEOMETRY_BOUND_EXCEEDED

    def test_threads_give_the_same_report(self):
        assert cosimplicial_check(2, threads=3) == cosimplicial_check(2)


class TestConic:
    """Fibers and boundary strata of conic degenerations."""

    def test_normalize_pair(self):
        assert normalize_pair((2, 4)) == (HALF, Fraction(1))
        assert normalize_pair((6, 3)) == (Fraction(1), HALF)
        assert normalize_pair(("3", 0)) == INFINITE_END

    @pytest.mark.parametrize("pair", [(0, 0), (-1, 1), (1,)])
    def test_invalid_pair(self, pair):
        with pytest.raises(GeometryError) as exc_info:
            normalize_pair(pair)

        assert exc_info.value.code == ErrorCode.GEOMETRY_INVALID_POINT

    def test_fiber_splits_at_zero_parameters(self):
        components = conic_fiber(3, (1, 0, 2))

        assert [c.window for c in components] == [(0, 1), (2, 3)]
        assert components[0].constant == {2: INFINITE_END, 3: INFINITE_END}
        assert components[1].constant == {0: ZERO_END, 1: ZERO_END}

    def test_generic_fiber_is_one_interval(self):
        (component,) = conic_fiber(2, (1, 3))

        assert component.window == (0, 1, 2)

    @pytest.mark.parametrize("s", [0, Fraction(1, 3), 5, None])
    def test_samples_lie_in_the_fiber(self, s):
        t = (1, 0, 2)
        for component in conic_fiber(3, t):
            assert conic_contains(t, component.sample(s))

    def test_fiber_parameter_count(self):
        with pytest.raises(GeometryError) as exc_info:
            conic_fiber(2, (1,))

        assert exc_info.value.code == ErrorCode.GEOMETRY_DIMENSION_MISMATCH

    def test_boundary_strata(self):
        strata = conic_boundary_strata(1, 1)

        assert [s.label for s in strata] == ["left", "right", "start", "stop"]
        assert [s.kind for s in strata] == ["embedding", "embedding", "end", "end"]

    def test_left_embedding_lands_in_its_stratum(self):
        (component,) = conic_fiber(1, (2,))
        pairs = component.sample(Fraction(1, 3))

        t, image = embed_left(1, 1, (2,), pairs, (Fraction(5),))

        left = conic_boundary_strata(1, 1)[0]
        assert left.contains(t, image)
        assert not conic_boundary_strata(1, 1)[1].contains(t, image)

    @pytest.mark.parametrize(("n", "m", "ell"), [(0, 0, 0), (1, 1, 1), (2, 0, 1)])
    def test_compatibility_square(self, n, m, ell):
        assert compatibility_square(n, m, ell)
