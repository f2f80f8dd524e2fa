"""Filling inner horns of flow simplices under constant obstruction rank.

The missing morphism spaces over ``(0, ..., n)`` are glued from products
``L(alpha) x Y(beta)`` over arrows ``alpha -> beta`` of the horn part of the
arc category, where ``L(alpha)`` is the L-block picked by the block functor
and ``Y(beta)`` the product of horn components along ``beta``.

Only reduced arcs are enumerated: internal edges lie on the interior object
sets. Breaks at the first or last vertex pass through fillers of other pairs
of endpoints and are not repeated here.
"""

from __future__ import annotations

import itertools
import logging
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from .bimodule_alg import compose_bimodules, interval_top_cells
from .constants import DEFAULT_EPSILON, DEFAULT_MAX_CODIM, GammaKind
from .constants import LBlockFacetTag as Tag
from .corner_model import is_corner_model
from .degeneration_geom import LBlock, face_witness, lblock_facets
from .error_codes import ErrorCode
from .exceptions import HornFillError
from .flow_data import CellIndex, CellKey, piece_cells, relabel_cell
from .models import FlowBimodule, FlowSimplex, FormalComponent, MorphismCell
from .reports import ValidationReport, Violation
from .strat_arcs import (
    RATIONAL_GAMMA,
    TRIVIAL_GAMMA,
    Arc,
    ArcCategory,
    Vertex,
    apply_morphism,
    block_functor,
    corner_category_on,
    horn_membership,
    morphisms_into,
)
from .utils import format_rational

logger = logging.getLogger(__name__)

Contribution = tuple[str, int]
Product = tuple[str, ...]


@dataclass(frozen=True)
class FillerCell:
    """``L(alpha) x Y(beta)``; codimension 0 exactly when ``alpha == beta``."""

    alpha: Arc
    beta: Arc
    block: tuple[int, int]
    dim: int
    products: int

    @property
    def top(self) -> bool:
        return self.alpha == self.beta

    def to_dict(self) -> dict[str, Any]:
        return {
            "alpha": str(self.alpha),
            "beta": str(self.beta),
            "block": list(self.block),
            "dim": self.dim,
            "products": self.products,
        }


@dataclass(frozen=True)
class FillerFacet:
    """A facet of a top cell: ``boundary``, ``glued``, ``empty`` or ``missing``.

    ``empty`` facets are glued to a horn arc whose product of components is
    empty, so nothing is attached along them.
    """

    cell: Arc
    facet: str
    kind: str
    label: Optional[Arc] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "cell": str(self.cell),
            "facet": self.facet,
            "kind": self.kind,
            "label": None if self.label is None else str(self.label),
        }


@dataclass(frozen=True)
class HornFillReport:
    n: int
    k: int
    source: str
    target: str
    grade: Fraction
    cells: tuple[FillerCell, ...] = ()
    facets: tuple[FillerFacet, ...] = ()
    strata: tuple[Arc, ...] = ()
    missing: Optional[MorphismCell] = None
    check: ValidationReport = field(default_factory=lambda: ValidationReport(ok=True))

    @property
    def ok(self) -> bool:
        return self.check.ok

    @property
    def is_empty(self) -> bool:
        return not self.cells

    def to_dict(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "n": self.n,
            "k": self.k,
            "source": self.source,
            "target": self.target,
            "grade": format_rational(self.grade),
            "cells": [c.to_dict() for c in self.cells],
            "facets": [f.to_dict() for f in self.facets],
            "strata": [str(a) for a in self.strata],
            "missing": (
                None
                if self.missing is None
                else self.missing.model_dump(mode="json", exclude_defaults=True)
            ),
            "check": self.check.to_dict(),
        }


# Arc bookkeeping


def contributions(arc: Arc) -> list[Contribution]:
    """The codimension contributions of ``arc``: internal edges and missing indices."""

    return [("edge", i) for i in range(1, len(arc.edges) - 1)] + [
        ("index", m) for m in sorted(arc.missing())
    ]


def smooth(arc: Arc, chosen: Sequence[Contribution]) -> Arc:
    """The coarser arc with the ``chosen`` contributions removed."""

    return apply_morphism(
        arc,
        {i for kind, i in chosen if kind == "edge"},
        {i for kind, i in chosen if kind == "index"},
    )


def is_reduced(arc: Arc, n: int) -> bool:
    return all(0 < m < n for m, _ in arc.internal_edges)


def top_arc(p: str, r: str, n: int, grade: Fraction = Fraction(0)) -> Arc:
    return Arc.minimal((0, p), (n, r), grade)


def missing_facet_arc(p: str, r: str, n: int, k: int, grade=Fraction(0)) -> Arc:
    top = top_arc(p, r, n, grade)
    vertex = top.vertices[0]
    return Arc(top.edges, (Vertex(vertex.indices - {k}, vertex.energy),))


# Horn payloads


def check_horn(horn: FlowSimplex, k: int) -> None:
    """Reject anything but an inner horn satisfying the constant-rank assumption."""

    n = horn.dimension
    if n < 2 or not 0 < k < n:
        raise HornFillError(
            f"Inner horns need 0 < k < n, got k={k}, n={n}",
            code=ErrorCode.HORN_INVALID_PAYLOAD,
        )

    missing_face = tuple(v for v in range(n + 1) if v != k)
    full = tuple(range(n + 1))
    for cell in horn.cells:
        if cell.face in (missing_face, full):
            raise HornFillError(
                f"Horn carries cells over the face {list(cell.face)}",
                code=ErrorCode.HORN_INVALID_PAYLOAD,
            )

    for cell in horn.all_cells():
        for component in cell.components:
            for facet in component.facets:
                if any(piece.added_rank for piece in facet.pieces):
                    raise HornFillError(
                        f"Component {component.id} over {cell.source}->{cell.target} "
                        "changes obstruction rank along its boundary",
                        code=ErrorCode.HORN_ASSUMPTION_VIOLATED,
                    )


class _Payload:
    """Products of horn components along arcs; a point per arc when discrete."""

    def __init__(self, horn: Optional[FlowSimplex]):
        self.horn = horn
        self.index = CellIndex(horn) if horn is not None else None
        self._coarser: dict[tuple, list[str]] = defaultdict(list)
        if self.index is None:
            return

        for key, cell in self.index.cells.items():
            for component in cell.components:
                for facet in component.facets:
                    for piece in facet.pieces:
                        keys = piece_cells(
                            cell.face,
                            cell.source,
                            cell.target,
                            cell.energy,
                            facet.label,
                        )
                        if keys is None or len(keys) != len(piece.components):
                            continue
                        parts = tuple(zip(keys, piece.components))
                        self._coarser[(key, parts)].append(component.id)

    @staticmethod
    def segment_key(arc: Arc, position: int) -> CellKey:
        (a, x), (b, y) = arc.edges[position], arc.edges[position + 1]
        vertex = arc.vertices[position]
        face = (a,) if a == b else (a, *sorted(vertex.indices), b)
        return (face, x, y, vertex.energy)

    def factors(self, arc: Arc) -> Optional[list[list[FormalComponent]]]:
        if self.index is None:
            windows = map(arc.window, range(len(arc.vertices)))
            if any(low == high for low, high in windows):
                return None
            point = FormalComponent(id="pt", total_dim=0, count=1)
            return [[point]] * len(arc.vertices)

        factors = []
        for position in range(len(arc.vertices)):
            cell = self.index.cell(self.segment_key(arc, position))
            if cell is None or not cell.components:
                return None
            factors.append(list(cell.components))

        return factors

    def products(self, arc: Arc) -> list[tuple[FormalComponent, ...]]:
        factors = self.factors(arc)
        if factors is None:
            return []

        return list(itertools.product(*factors))

    def coarser(self, arc: Arc, product: Product, step: Contribution) -> list[Product]:
        """Products with ``step`` smoothed whose boundary contains ``product``."""

        if self.index is None:
            return [("pt",) * (len(product) - 1 if step[0] == "edge" else len(product))]

        coarse = smooth(arc, [step])
        kind, i = step
        if kind == "edge":
            merged = i - 1
            parts = (
                (self.segment_key(arc, i - 1), product[i - 1]),
                (self.segment_key(arc, i), product[i]),
            )
            head, tail = product[: i - 1], product[i + 1 :]
        else:
            merged = arc.vertex_for(i)
            parts = ((self.segment_key(arc, merged), product[merged]),)
            head, tail = product[:merged], product[merged + 1 :]

        key = self.segment_key(coarse, merged)
        return [head + (c,) + tail for c in self._coarser.get((key, parts), [])]


def _energy_decompositions(horn: FlowSimplex, grade: Fraction, length: int):
    energies = sorted({Fraction(0)} | {c.energy for c in horn.all_cells()})
    found = set()
    for size in range(1, length + 1):
        for parts in itertools.product(energies, repeat=size):
            if sum(parts) == grade:
                found.add(parts)

    return frozenset(found)


# Filling


def _reduced_horn_arcs(
    sequence, k: int, p: str, r: str, grade: Fraction, horn, max_codim: int
) -> list[Arc]:
    n = len(sequence) - 1
    rational = horn is not None and horn.gamma == GammaKind.NONNEG_RATIONAL
    category = ArcCategory(
        sequence,
        RATIONAL_GAMMA if rational else TRIVIAL_GAMMA,
        source=(0, p),
        target=(n, r),
        grade=grade,
        energy_decompositions=(
            _energy_decompositions(horn, grade, max_codim + 1) if rational else None
        ),
    )
    return [
        arc
        for arc in category.enumerate_objects(max_codim)
        if is_reduced(arc, n) and horn_membership(arc, k, n)
    ]


def _stratum(alpha: Arc, k: int, zeros: frozenset[int], hypersurface: bool, n: int):
    """The arc labelling a face of ``L(alpha)``; the zero faces are kept."""

    own = [c for c in contributions(alpha) if c != ("index", k)]
    flag = 1 if ("index", k) in contributions(alpha) else 0
    if flag == 0 and hypersurface:
        return missing_facet_arc(alpha.source[1], alpha.target[1], n, k, alpha.grade)

    smoothed = [c for j, c in enumerate(own) if j not in zeros]
    if flag == 1 and not hypersurface:
        smoothed.append(("index", k))

    return smooth(alpha, smoothed)


def horn_fill_strata(
    sequence: Sequence[Sequence[str]],
    k: int,
    p: str,
    r: str,
    grade: Fraction | int = 0,
    horn: Optional[FlowSimplex] = None,
    max_codim: int = DEFAULT_MAX_CODIM,
    epsilon: Fraction = DEFAULT_EPSILON,
) -> HornFillReport:
    """Glue the filler of the morphism space from ``p`` to ``r`` and check its strata.

    Without ``horn`` every vertex category is discrete and every horn cell a
    single point.
    """

    sequence = tuple(tuple(s) for s in sequence)
    n = len(sequence) - 1
    grade = Fraction(grade)
    if horn is not None:
        check_horn(horn, k)
        if tuple(v.object_ids for v in horn.vertices) != sequence:
            raise HornFillError(
                "Horn vertex categories do not match the object sequence",
                code=ErrorCode.HORN_INVALID_PAYLOAD,
            )
    elif n < 2 or not 0 < k < n:
        raise HornFillError(code=ErrorCode.HORN_INVALID_PAYLOAD)

    payload = _Payload(horn)
    arcs = _reduced_horn_arcs(sequence, k, p, r, grade, horn, max_codim)
    products = {arc: payload.products(arc) for arc in arcs}
    supported = [arc for arc in arcs if products[arc]]
    members = set(supported)
    # Horn arcs without products are empty strata of the filler.
    empty = set(arcs) - members

    cells: list[FillerCell] = []
    facets: list[FillerFacet] = []
    strata: set[Arc] = set()
    violations: list[Violation] = []
    missing_pieces: list[tuple[Arc, tuple[FormalComponent, ...]]] = []

    for beta in supported:
        dim_y = sum(c.total_dim for c in products[beta][0])
        for morphism in morphisms_into(beta):
            alpha = morphism.source
            if alpha not in members:
                continue
            d, flag = block_functor(alpha, k, n, strict=False)
            cells.append(
                FillerCell(
                    alpha, beta, (d, flag), d + flag + dim_y, len(products[beta])
                )
            )

    for alpha in supported:
        d, flag = block_functor(alpha, k, n, strict=False)
        block = LBlock(d, flag, epsilon)
        own = [c for c in contributions(alpha) if c != ("index", k)]
        atoms = [
            smooth(alpha, [c for c in own if c != kept] + [("index", k)] * flag)
            for kept in own
        ]
        for facet in lblock_facets(d, flag):
            if facet.tag == Tag.X_ZERO:
                kind, label = "boundary", atoms[facet.coordinate]
            elif facet.tag == Tag.X_ONE:
                kind, label = "glued", smooth(alpha, [own[facet.coordinate]])
            elif facet.tag == Tag.Y_ONE:
                kind, label = "glued", smooth(alpha, [("index", k)])
            else:
                kind, label = "missing", missing_facet_arc(p, r, n, k, grade)
                missing_pieces += [(alpha, y) for y in products[alpha]]

            if kind == "glued" and label in empty:
                kind = "empty"
            facets.append(FillerFacet(alpha, str(facet), kind, label))
            if kind == "glued" and label not in members:
                violations.append(
                    Violation.of(
                        ErrorCode.HORN_STRATIFICATION_MISMATCH,
                        str(alpha),
                        str(facet),
                        detail=f"glued to {label}, which carries no horn data",
                    )
                )

        for size in range(d + 1):
            for zeros in itertools.combinations(range(d), size):
                for hypersurface in (False, True):
                    if face_witness(block, zeros, hypersurface) is None:
                        continue
                    strata.add(_stratum(alpha, k, frozenset(zeros), hypersurface, n))

    expected = set(supported)
    if supported:
        expected |= {top_arc(p, r, n, grade), missing_facet_arc(p, r, n, k, grade)}
    for arc in sorted(strata - expected - empty, key=Arc.sort_key):
        violations.append(
            Violation.of(
                ErrorCode.HORN_STRATIFICATION_MISMATCH,
                str(arc),
                detail="stratum of the filler without horn data",
            )
        )
    for arc in sorted(expected - strata, key=Arc.sort_key):
        violations.append(
            Violation.of(
                ErrorCode.HORN_STRATIFICATION_MISMATCH,
                str(arc),
                detail="arc not realized by any face of the filler",
            )
        )

    ordered = tuple(sorted(strata, key=Arc.sort_key))
    if ordered:
        model = is_corner_model(corner_category_on(ordered))
        violations += list(model.violations)

    missing = _missing_cell(payload, missing_pieces, n, k, p, r, grade, violations)
    logger.debug(
        "Filled %s -> %s: %d cells, %d strata, %d violations",
        p,
        r,
        len(cells),
        len(ordered),
        len(violations),
    )
    return HornFillReport(
        n=n,
        k=k,
        source=p,
        target=r,
        grade=grade,
        cells=tuple(cells),
        facets=tuple(facets),
        strata=ordered,
        missing=missing,
        check=ValidationReport.from_violations(violations),
    )


def _missing_cell(
    payload: _Payload,
    pieces: list[tuple[Arc, tuple[FormalComponent, ...]]],
    n: int,
    k: int,
    p: str,
    r: str,
    grade: Fraction,
    violations: list[Violation],
) -> Optional[MorphismCell]:
    """Glue the hypersurface pieces ``hyper(alpha) x Y(alpha)`` into components."""

    if not pieces:
        return None

    nodes = {(alpha, tuple(c.id for c in y)): (alpha, y) for alpha, y in pieces}
    parent = {node: node for node in nodes}

    def find(node):
        while parent[node] != node:
            parent[node] = parent[parent[node]]
            node = parent[node]
        return node

    for alpha, ids in nodes:
        own = [c for c in contributions(alpha) if c != ("index", k)]
        d = len(own)
        steps = own if d >= 2 else []
        if ("index", k) in contributions(alpha) and d >= 1:
            steps = steps + [("index", k)]
        for step in steps:
            coarse = smooth(alpha, [step])
            for other in payload.coarser(alpha, ids, step):
                if (coarse, other) in parent:
                    parent[find((alpha, ids))] = find((coarse, other))

    classes: dict[tuple, list[tuple]] = defaultdict(list)
    for node in nodes:
        classes[find(node)].append(node)

    components = []
    ordered = sorted(classes.values(), key=lambda ns: min(map(repr, ns)))
    for i, members in enumerate(ordered):
        dims = set()
        for node in members:
            alpha, y = nodes[node]
            d, flag = block_functor(alpha, k, n, strict=False)
            dims.add(
                (
                    d + flag - 1 + sum(c.total_dim for c in y),
                    sum(c.obstruction_rank for c in y),
                )
            )
        if len(dims) != 1:
            violations.append(
                Violation.of(
                    ErrorCode.HORN_STRATIFICATION_MISMATCH,
                    p,
                    r,
                    detail=(
                        f"missing-facet component {i} "
                        f"mixes dimensions {sorted(dims)}"
                    ),
                )
            )
            continue
        total, rank = dims.pop()
        count = 0
        if total == rank and len(members) == 1:
            count = 1
            for c in nodes[members[0]][1]:
                count *= c.count
        components.append(
            FormalComponent(
                id=f"fill{i}",
                total_dim=total,
                obstruction_rank=rank,
                count=count,
                facets_available=False,
            )
        )

    return MorphismCell(
        face=tuple(v for v in range(n + 1) if v != k),
        source=p,
        target=r,
        energy=grade,
        components=tuple(components),
    )


def fill_horn(
    horn: FlowSimplex,
    k: int,
    max_codim: int = DEFAULT_MAX_CODIM,
    epsilon: Fraction = DEFAULT_EPSILON,
) -> list[HornFillReport]:
    """Run :func:`horn_fill_strata` for every endpoint pair and grade of the horn."""

    check_horn(horn, k)
    n = horn.dimension
    sequence = tuple(v.object_ids for v in horn.vertices)
    grades = {Fraction(0)}
    if horn.gamma == GammaKind.NONNEG_RATIONAL:
        grades = _reachable_grades(horn)

    reports = []
    for p in sequence[0]:
        for r in sequence[n]:
            for grade in sorted(grades):
                report = horn_fill_strata(
                    sequence, k, p, r, grade, horn, max_codim, epsilon
                )
                if not report.is_empty:
                    reports.append(report)

    return reports


def _reachable_grades(horn: FlowSimplex) -> set[Fraction]:
    energies = sorted({c.energy for c in horn.all_cells()} | {Fraction(0)})
    grades = set(energies)
    for parts in itertools.product(energies, repeat=horn.dimension):
        grades.add(sum(parts))

    return grades


def fill_inner_2horn(horn: FlowSimplex) -> FlowSimplex:
    """Fill a horn over ``(0, 1)`` and ``(1, 2)`` by composing its two bimodules.

    The new edge carries the composite; every top component is an interval
    from a composite component to the product it was glued from.
    """

    check_horn(horn, 1)
    if horn.dimension != 2:
        raise HornFillError(
            f"Expected a 2-dimensional horn, got dimension {horn.dimension}",
            code=ErrorCode.HORN_INVALID_PAYLOAD,
        )

    left = FlowBimodule(
        gamma=horn.gamma,
        vertices=horn.vertices[:2],
        cells=horn.cells_of((0, 1)),
    )
    right = FlowBimodule(
        gamma=horn.gamma,
        vertices=horn.vertices[1:],
        cells=tuple(
            relabel_cell(cell, (0, 1), lambda m: m - 1)
            for cell in horn.cells_of((1, 2))
        ),
    )
    composite = compose_bimodules(left, right)
    long_edge = tuple(
        relabel_cell(cell, (0, 2), lambda m: 2 * m) for cell in composite.cells
    )
    top = interval_top_cells(left, right, composite)
    return FlowSimplex(
        dimension=2,
        gamma=horn.gamma,
        vertices=horn.vertices,
        cells=horn.cells + long_edge + top,
    )


def horn_from_bimodules(B12: FlowBimodule, B23: FlowBimodule) -> FlowSimplex:
    """The horn over ``(0, 1)`` and ``(1, 2)`` spanned by two composable bimodules."""

    if B12.right.object_ids != B23.left.object_ids:
        raise HornFillError(
            "Bimodules do not share their middle flow category.",
            code=ErrorCode.HORN_INVALID_PAYLOAD,
        )

    return FlowSimplex(
        dimension=2,
        gamma=B12.gamma,
        vertices=(B12.left, B12.right, B23.right),
        cells=B12.middle()
        + tuple(relabel_cell(cell, (1, 2), lambda m: m + 1) for cell in B23.middle()),
    )
