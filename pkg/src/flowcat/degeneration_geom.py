"""Exact point-set models of the degeneration spaces used by horn filling.

L-blocks: for ``0 < epsilon < 1``

* ``L(d, 0) = {x in [0,1]^d : prod(x) <= epsilon}``
* ``L(d, 1) = {(x, y) in [0,1]^(d+1) : (1 - y)^2 + prod(x)^2 / epsilon^2 <= 1}``

Setting an ``x`` coordinate to 1 embeds ``L(d-1, flag)`` into ``L(d, flag)``;
setting ``y`` to 1 embeds ``L(d, 0)`` into ``L(d, 1)``.

Conic bundles: ``D(n+1)`` lies over ``[0, inf)^n`` with one projective
interval factor ``(x_i : y_i)`` for ``0 <= i <= n``, cut out by
``x_(i-1) * y_i = t_i * y_(i-1) * x_i``.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .constants import DEFAULT_EPSILON, DEFAULT_GRID_STEPS, MAX_LBLOCK_DIMENSION
from .constants import LBlockFacetTag as Tag
from .error_codes import ErrorCode
from .exceptions import GeometryError
from .reports import ValidationReport, Violation
from .utils import format_rational, parallel_map, parse_rational

logger = logging.getLogger(__name__)

Pair = tuple[Fraction, Fraction]

ZERO_END: Pair = (Fraction(0), Fraction(1))
INFINITE_END: Pair = (Fraction(1), Fraction(0))


# L-blocks


@dataclass(frozen=True)
class LBlock:
    d: int
    flag: int = 0
    epsilon: Fraction = DEFAULT_EPSILON

    def __post_init__(self) -> None:
        object.__setattr__(self, "epsilon", parse_rational(self.epsilon))
        if not 0 < self.epsilon < 1:
            raise GeometryError(code=ErrorCode.GEOMETRY_INVALID_EPSILON)
        if self.flag not in (0, 1) or self.d < 0:
            raise GeometryError(
                f"No L-block with d={self.d}, flag={self.flag}",
                code=ErrorCode.GEOMETRY_DIMENSION_MISMATCH,
            )

    @property
    def ambient_dim(self) -> int:
        return self.d + self.flag

    @property
    def is_empty(self) -> bool:
        # The empty product is 1 > epsilon.
        return self.d == 0

    def __str__(self) -> str:
        return f"L({self.d},{self.flag})"


@dataclass(frozen=True)
class LBlockFacet:
    tag: Tag
    coordinate: Optional[int] = None
    target: Optional[tuple[int, int]] = None

    def __str__(self) -> str:
        if self.coordinate is None:
            return self.tag.value

        return f"{self.tag.value}[{self.coordinate}]"


def _coordinates(L: LBlock, point: Sequence[object]) -> tuple[Fraction, ...]:
    values = tuple(parse_rational(v) for v in point)
    if len(values) != L.ambient_dim:
        raise GeometryError(
            f"{L} takes {L.ambient_dim} coordinates, got {len(values)}",
            code=ErrorCode.GEOMETRY_DIMENSION_MISMATCH,
        )
    if any(not 0 <= v <= 1 for v in values):
        raise GeometryError(code=ErrorCode.GEOMETRY_COORDINATE_RANGE)

    return values


def _defining_value(L: LBlock, values: tuple[Fraction, ...]) -> Fraction:
    """Left-hand side of the defining inequality; the bound is epsilon or 1."""

    product = math.prod(values[: L.d], start=Fraction(1))
    if L.flag == 0:
        return product

    y = values[L.d]
    return (1 - y) ** 2 + product**2 / L.epsilon**2


def _bound(L: LBlock) -> Fraction:
    return L.epsilon if L.flag == 0 else Fraction(1)


def lblock_contains(L: LBlock, point: Sequence[object]) -> bool:
    values = _coordinates(L, point)
    return _defining_value(L, values) <= _bound(L)


def lblock_facets(d: int, flag: int) -> list[LBlockFacet]:
    """Codimension-1 faces of ``L(d, flag)`` with their gluing targets.

    An ``x_j = 1`` face is a copy of ``L(d-1, flag)`` and is omitted when that
    block is empty; the ``y = 1`` face is a copy of ``L(d, 0)``.
    """

    if d < 0 or flag not in (0, 1):
        raise GeometryError(
            f"No L-block with d={d}, flag={flag}",
            code=ErrorCode.GEOMETRY_DIMENSION_MISMATCH,
        )
    if d == 0:
        return []

    facets = [LBlockFacet(Tag.X_ZERO, j) for j in range(d)]
    if d >= 2:
        facets += [LBlockFacet(Tag.X_ONE, j, (d - 1, flag)) for j in range(d)]
    if flag == 1:
        facets.append(LBlockFacet(Tag.Y_ONE, None, (d, 0)))
    facets.append(LBlockFacet(Tag.HYPERSURFACE))
    return facets


def expected_facet_count(d: int, flag: int) -> int:
    if d == 0:
        return 0
    if d == 1:
        return 2 + flag

    return 2 * d + 1 + flag


def on_facet(L: LBlock, facet: LBlockFacet, point: Sequence[object]) -> bool:
    values = _coordinates(L, point)
    if _defining_value(L, values) > _bound(L):
        return False

    if facet.tag == Tag.X_ZERO:
        return values[facet.coordinate] == 0
    if facet.tag == Tag.X_ONE:
        return values[facet.coordinate] == 1
    if facet.tag == Tag.Y_ONE:
        return L.flag == 1 and values[L.d] == 1

    return _defining_value(L, values) == _bound(L)


def boundary_tags(L: LBlock, point: Sequence[object]) -> list[LBlockFacet]:
    """The facets of ``L`` containing ``point``; empty for interior points."""

    return [f for f in lblock_facets(L.d, L.flag) if on_facet(L, f, point)]


def face_witness(
    L: LBlock, zeros: Iterable[int], hypersurface: bool = False
) -> Optional[tuple[Fraction, ...]]:
    """An exact point of ``L`` on exactly the given boundary faces, or None.

    Only the ``x_j = 0`` faces and the hypersurface are considered; the
    witness never touches an ``x_j = 1`` or ``y = 1`` face.
    """

    zeros = frozenset(zeros)
    if L.is_empty or any(not 0 <= j < L.d for j in zeros):
        return None

    eps, d = L.epsilon, L.d
    x = [Fraction(0) if j in zeros else eps / 2 for j in range(d)]
    # c ** (d - 1) > (1 + eps) / 2 keeps rescaled first coordinates below 1.
    c = 1 - (1 - eps) / (2 * d)

    if L.flag == 0:
        if hypersurface:
            if zeros:
                return None
            x = [c] * d
            x[0] = eps / c ** (d - 1)
        point = tuple(x)
    elif hypersurface and zeros:
        point = (*x, Fraction(0))
    elif hypersurface:
        x = [c] * d
        x[0] = Fraction(3, 5) * eps / c ** (d - 1)
        point = (*x, Fraction(1, 5))
    else:
        point = (*x, Fraction(1, 2))

    found = {(f.tag, f.coordinate) for f in boundary_tags(L, point)}
    wanted = {(Tag.X_ZERO, j) for j in zeros}
    if hypersurface:
        wanted.add((Tag.HYPERSURFACE, None))

    return point if found == wanted else None


def coface(point: Sequence[Fraction], j: int) -> tuple[Fraction, ...]:
    """Insert the coordinate ``x_j = 1``; a trailing ``y`` stays last."""

    values = tuple(point)
    return values[:j] + (Fraction(1),) + values[j:]


def y_inclusion(point: Sequence[Fraction]) -> tuple[Fraction, ...]:
    return tuple(point) + (Fraction(1),)


def _grid(dimension: int, steps: int) -> Iterable[tuple[Fraction, ...]]:
    axis = [Fraction(k, steps) for k in range(steps + 1)]
    return itertools.product(axis, repeat=dimension)


def _check_block(job: tuple[int, int, Fraction, int]) -> list[Violation]:
    d, flag, epsilon, steps = job
    violations: list[Violation] = []
    target = LBlock(d, flag, epsilon)
    where = str(target)

    facets = lblock_facets(d, flag)
    if len(facets) != expected_facet_count(d, flag):
        violations.append(
            Violation.of(
                ErrorCode.GEOMETRY_COSIMPLICIAL_FAILURE,
                where,
                detail=(
                    f"{len(facets)} facets, "
                    f"expected {expected_facet_count(d, flag)}"
                ),
            )
        )
    for facet in facets:
        if facet.target is not None and LBlock(*facet.target, epsilon).is_empty:
            violations.append(
                Violation.of(
                    ErrorCode.GEOMETRY_COSIMPLICIAL_FAILURE,
                    where,
                    str(facet),
                    detail="glued to an empty block",
                )
            )

    if d >= 1:
        source = LBlock(d - 1, flag, epsilon)
        x_facets = {f.coordinate: f for f in facets if f.tag == Tag.X_ONE}
        for point in _grid(source.ambient_dim, steps):
            inside = not source.is_empty and lblock_contains(source, point)
            for j in range(d):
                image = coface(point, j)
                if lblock_contains(target, image) != inside:
                    violations.append(
                        Violation.of(
                            ErrorCode.GEOMETRY_COSIMPLICIAL_FAILURE,
                            where,
                            f"d{j}",
                            detail=f"image of {_show(point)} disagrees with {source}",
                        )
                    )
                elif inside and d >= 2 and x_facets[j] not in boundary_tags(
                    target, image
                ):
                    violations.append(
                        Violation.of(
                            ErrorCode.GEOMETRY_COSIMPLICIAL_FAILURE,
                            where,
                            f"d{j}",
                            detail=f"image of {_show(point)} misses its facet",
                        )
                    )

    if d >= 2:
        for point in _grid(d - 2 + flag, steps):
            for j in range(1, d):
                for i in range(j):
                    if coface(coface(point, i), j) != coface(coface(point, j - 1), i):
                        violations.append(
                            Violation.of(
                                ErrorCode.GEOMETRY_COSIMPLICIAL_FAILURE,
                                where,
                                f"d{j}d{i}",
                            )
                        )

    if flag == 1:
        flat = LBlock(d, 0, epsilon)
        y_facet = LBlockFacet(Tag.Y_ONE, None, (d, 0))
        for point in _grid(d, steps):
            inside = not flat.is_empty and lblock_contains(flat, point)
            image = y_inclusion(point)
            if lblock_contains(target, image) != inside:
                violations.append(
                    Violation.of(
                        ErrorCode.GEOMETRY_COSIMPLICIAL_FAILURE,
                        where,
                        "y",
                        detail=f"image of {_show(point)} disagrees with {flat}",
                    )
                )
            elif inside and y_facet not in boundary_tags(target, image):
                violations.append(
                    Violation.of(
                        ErrorCode.GEOMETRY_COSIMPLICIAL_FAILURE,
                        where,
                        "y",
                        detail=f"image of {_show(point)} misses the y=1 facet",
                    )
                )
            for j in range(d):
                if y_inclusion(coface(point[: d - 1], j)) != coface(
                    y_inclusion(point[: d - 1]), j
                ):
                    violations.append(
                        Violation.of(
                            ErrorCode.GEOMETRY_COSIMPLICIAL_FAILURE, where, f"yd{j}"
                        )
                    )

    return violations


def _show(point: Sequence[Fraction]) -> str:
    return "(" + ",".join(format_rational(v) for v in point) + ")"


def cosimplicial_check(
    max_d: int,
    epsilon: Fraction = DEFAULT_EPSILON,
    grid_steps: int = DEFAULT_GRID_STEPS,
    threads: int | None = None,
) -> ValidationReport:
    """Check the coordinate-one inclusions of L-blocks up to ``max_d`` on a grid.

    Covers facet counts, that every coface image is exactly the slice of the
    bigger block, the cosimplicial identities and the ``y = 1`` inclusion.
    """

    if max_d > MAX_LBLOCK_DIMENSION:
        raise GeometryError(
            f"max_d={max_d} exceeds {MAX_LBLOCK_DIMENSION}",
            code=ErrorCode.GEOMETRY_BOUND_EXCEEDED,
        )
    epsilon = LBlock(0, 0, epsilon).epsilon

    jobs = [(d, flag, epsilon, grid_steps) for d in range(max_d + 1) for flag in (0, 1)]
    results = parallel_map(_check_block, jobs, threads)
    violations = [v for found in results for v in found]
    logger.debug("Checked %d L-blocks, %d violations", len(jobs), len(violations))
    return ValidationReport.from_violations(violations)


# Conic bundles


def normalize_pair(pair: Sequence[object]) -> Pair:
    """Scale a nonnegative homogeneous pair so its larger entry is 1."""

    if len(pair) != 2:
        raise GeometryError(code=ErrorCode.GEOMETRY_INVALID_POINT)

    x, y = (parse_rational(v) for v in pair)
    if x < 0 or y < 0 or (x == 0 and y == 0):
        raise GeometryError(
            f"Invalid homogeneous pair ({x}:{y})", code=ErrorCode.GEOMETRY_INVALID_POINT
        )

    top = max(x, y)
    return x / top, y / top


def _parameters(t: Sequence[object]) -> tuple[Fraction, ...]:
    values = tuple(parse_rational(v) for v in t)
    if any(v < 0 for v in values):
        raise GeometryError(
            "Conic parameters must be nonnegative",
            code=ErrorCode.GEOMETRY_COORDINATE_RANGE,
        )

    return values


def conic_contains(t: Sequence[object], pairs: Sequence[Sequence[object]]) -> bool:
    """Membership of ``pairs`` in the fiber of the conic bundle over ``t``."""

    t = _parameters(t)
    if len(pairs) != len(t) + 1:
        raise GeometryError(
            f"{len(t)} parameters need {len(t) + 1} factors, got {len(pairs)}",
            code=ErrorCode.GEOMETRY_DIMENSION_MISMATCH,
        )

    points = [normalize_pair(p) for p in pairs]
    return all(
        points[i - 1][0] * points[i][1] == t[i - 1] * points[i - 1][1] * points[i][0]
        for i in range(1, len(points))
    )


@dataclass(frozen=True)
class ConicComponent:
    """One interval of a conic fiber.

    Factors ``start..stop`` (inclusive) vary along the interval; factors to
    the left are fixed at ``(0:1)`` and factors to the right at ``(1:0)``.
    """

    t: tuple[Fraction, ...]
    index: int
    start: int
    stop: int

    @property
    def window(self) -> tuple[int, ...]:
        return tuple(range(self.start, self.stop + 1))

    @property
    def constant(self) -> dict[int, Pair]:
        factors = range(len(self.t) + 1)
        return {
            i: ZERO_END if i < self.start else INFINITE_END
            for i in factors
            if not self.start <= i <= self.stop
        }

    def sample(self, s: object) -> tuple[Pair, ...]:
        """The point whose first window factor is ``(s:1)``, or ``(1:0)`` for s=None."""

        first = INFINITE_END if s is None else normalize_pair((s, 1))
        points = [ZERO_END] * self.start + [first]
        for i in range(self.start + 1, self.stop + 1):
            x, y = points[-1]
            points.append(normalize_pair((x, self.t[i - 1] * y)))
        points += [INFINITE_END] * (len(self.t) - self.stop)
        return tuple(points)

    def endpoints(self) -> tuple[tuple[Pair, ...], tuple[Pair, ...]]:
        return self.sample(0), self.sample(None)

    def to_dict(self) -> dict:
        return {
            "component": self.index,
            "window": list(self.window),
            "constant": {
                str(i): [format_rational(x), format_rational(y)]
                for i, (x, y) in sorted(self.constant.items())
            },
        }


def conic_fiber(n: int, t: Sequence[object]) -> list[ConicComponent]:
    """Components of the fiber over ``t``: one more than the number of zero entries."""

    t = _parameters(t)
    if len(t) != n:
        raise GeometryError(
            f"Expected {n} parameters, got {len(t)}",
            code=ErrorCode.GEOMETRY_DIMENSION_MISMATCH,
        )

    cuts = [0] + [i for i in range(1, n + 1) if t[i - 1] == 0] + [n + 1]
    return [
        ConicComponent(t, r, cuts[r], cuts[r + 1] - 1) for r in range(len(cuts) - 1)
    ]


def embed_left(
    n: int,
    m: int,
    t_left: Sequence[Fraction],
    pairs_left: Sequence[Pair],
    t_right: Sequence[Fraction],
) -> tuple[tuple[Fraction, ...], tuple[Pair, ...]]:
    """``D(n+1) x [0,inf)^m`` into ``D(n+m+2)`` over ``t_(n+1) = 0``."""

    if len(t_left) != n or len(pairs_left) != n + 1 or len(t_right) != m:
        raise GeometryError(code=ErrorCode.GEOMETRY_DIMENSION_MISMATCH)

    t = tuple(t_left) + (Fraction(0),) + tuple(t_right)
    return t, tuple(pairs_left) + (INFINITE_END,) * (m + 1)


def embed_right(
    n: int,
    m: int,
    t_left: Sequence[Fraction],
    t_right: Sequence[Fraction],
    pairs_right: Sequence[Pair],
) -> tuple[tuple[Fraction, ...], tuple[Pair, ...]]:
    """``[0,inf)^n x D(m+1)`` into ``D(n+m+2)`` over ``t_(n+1) = 0``."""

    if len(t_left) != n or len(t_right) != m or len(pairs_right) != m + 1:
        raise GeometryError(code=ErrorCode.GEOMETRY_DIMENSION_MISMATCH)

    t = tuple(t_left) + (Fraction(0),) + tuple(t_right)
    return t, (ZERO_END,) * (n + 1) + tuple(pairs_right)


@dataclass(frozen=True)
class ConicStratum:
    label: str
    kind: str
    model: str
    zero_parameters: tuple[int, ...]
    fixed: dict[int, Pair] = field(default_factory=dict)

    def contains(self, t: Sequence[object], pairs: Sequence[Sequence[object]]) -> bool:
        t = _parameters(t)
        if not conic_contains(t, pairs):
            return False
        if any(t[i - 1] != 0 for i in self.zero_parameters):
            return False

        return all(normalize_pair(pairs[i]) == p for i, p in self.fixed.items())


def conic_boundary_strata(n: int, m: int) -> list[ConicStratum]:
    """Codimension-1 strata of ``D(n+m+2)`` over the face ``t_(n+1) = 0``.

    Two embeddings of smaller conic bundles, and the two ends of the fiber
    intervals where every factor is ``(0:1)`` or every factor is ``(1:0)``.
    """

    if n < 0 or m < 0:
        raise GeometryError(code=ErrorCode.GEOMETRY_DIMENSION_MISMATCH)

    total = n + m + 2
    split = (n + 1,)
    return [
        ConicStratum(
            "left",
            "embedding",
            f"D{n + 1} x [0,inf)^{m}",
            split,
            {i: INFINITE_END for i in range(n + 1, total)},
        ),
        ConicStratum(
            "right",
            "embedding",
            f"[0,inf)^{n} x D{m + 1}",
            split,
            {i: ZERO_END for i in range(n + 1)},
        ),
        ConicStratum(
            "start", "end", f"D0 x [0,inf)^{total - 1}", (), {0: ZERO_END}
        ),
        ConicStratum(
            "stop", "end", f"[0,inf)^{total - 1} x D0", (), {total - 1: INFINITE_END}
        ),
    ]


def _sample_fiber(m: int) -> list[tuple[tuple[Fraction, ...], tuple[Pair, ...]]]:
    samples = []
    for t in itertools.product((Fraction(0), Fraction(2)), repeat=m):
        for component in conic_fiber(m, t):
            first, last = component.endpoints()
            samples += [(t, first), (t, component.sample(Fraction(1, 3))), (t, last)]

    return samples


def compatibility_square(n: int, m: int, ell: int) -> bool:
    """The two ways of degenerating ``D(n+m+ell+3)`` twice agree on ``D(m+1)``.

    Splitting first at ``t_(n+1)`` and then the right piece, or first at
    ``t_(n+m+2)`` and then the left piece, must embed every point identically
    and land in the bundle.
    """

    t_left = (Fraction(1),) * n
    t_right = (Fraction(3, 2),) * ell
    for t_mid, pairs_mid in _sample_fiber(m):
        t_inner, p_inner = embed_left(m, ell, t_mid, pairs_mid, t_right)
        first = embed_right(n, m + ell + 1, t_left, t_inner, p_inner)

        t_inner, p_inner = embed_right(n, m, t_left, t_mid, pairs_mid)
        second = embed_left(n + m + 1, ell, t_inner, p_inner, t_right)

        if first != second or not conic_contains(*first):
            logger.debug("Square (%d,%d,%d) fails at %s", n, m, ell, first)
            return False

    return True
