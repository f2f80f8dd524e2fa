"""Validation and simplicial structure of flow categories and flow simplices.

Conventions used throughout:

* a component of the cell ``(face, p, r)`` over a face with ``|face|`` vertices
  has virtual dimension ``dim(p) - dim(r) + |face| - 2`` plus its index bundle;
* a facet piece contributes ``sign * product of counts`` to the boundary of a
  1-dimensional component, and the position rule fixes the signs: a break at
  the vertex in position ``i`` of the face has sign ``(-1)**i`` and forgetting
  the vertex in position ``i`` has sign ``(-1)**(i + 1)``.
"""

from __future__ import annotations

import json
import logging
from collections import Counter, defaultdict
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import networkx as nx

from .constants import (
    CONE_SOURCE_PREFIX,
    CONE_TARGET_PREFIX,
    DEGENERATE_SUFFIX,
    UNIT_PREFIX,
    FacetKind,
    GammaKind,
    Ring,
)
from .error_codes import ErrorCode
from .exceptions import FlowDataError
from .models import (
    Facet,
    FacetLabel,
    FacetPiece,
    FlowBimodule,
    FlowCategory,
    FlowObject,
    FlowSimplex,
    FormalComponent,
    MorphismCell,
    VirtualDim,
)
from .reports import ValidationReport, Violation
from .types import FaceIndex
from .utils import format_rational, parallel_map

logger = logging.getLogger(__name__)

CellKey = tuple[FaceIndex, str, str, Fraction]
Handle = tuple[FaceIndex, str, str, Fraction, str]


def degenerate_id(component_id: str) -> str:
    return f"{component_id}{DEGENERATE_SUFFIX}"


def unit_id(object_id: str) -> str:
    return f"{UNIT_PREFIX}{object_id}"


def global_vertex(face: FaceIndex, vertex: int) -> int:
    """Vertex categories store labels locally at vertex 0."""

    return face[0] if len(face) == 1 else vertex


def facet_sign(face: FaceIndex, label: FacetLabel) -> int:
    """Orientation sign of a facet of a component over ``face``."""

    if label.kind == FacetKind.BREAK:
        position = face.index(global_vertex(face, label.through_vertex))
        return -1 if position % 2 else 1

    position = face.index(label.index)
    return 1 if position % 2 else -1


def piece_cells(
    face: FaceIndex, source: str, target: str, energy: Fraction, label: FacetLabel
) -> Optional[list[CellKey]]:
    """Cells holding a facet piece's components, or None for a malformed label."""

    if label.kind == FacetKind.BREAK:
        if len(face) == 1 and label.through_vertex != 0:
            return None

        vertex = global_vertex(face, label.through_vertex)
        if vertex not in face:
            return None

        left_energy, right_energy = label.energy_split
        if left_energy + right_energy != energy:
            return None

        position = face.index(vertex)
        return [
            (face[: position + 1], source, label.through, left_energy),
            (face[position:], label.through, target, right_energy),
        ]

    if label.index not in face[1:-1]:
        return None

    return [(tuple(v for v in face if v != label.index), source, target, energy)]


def _expected_vdim(face: FaceIndex, source_dim: int, target_dim: int) -> int:
    return source_dim - target_dim + len(face) - 2


class CellIndex:
    """Lookup of the cells of a simplex by face, endpoints and energy."""

    def __init__(self, simplex: FlowSimplex):
        self.simplex = simplex
        self.cells: dict[CellKey, MorphismCell] = {}
        self.duplicates: list[CellKey] = []
        self.objects: list[dict[str, FlowObject]] = []
        self.duplicate_objects: list[tuple[int, str]] = []

        for i, vertex in enumerate(simplex.vertices):
            table: dict[str, FlowObject] = {}
            for obj in vertex.objects:
                if obj.id in table:
                    self.duplicate_objects.append((i, obj.id))
                table[obj.id] = obj
            self.objects.append(table)

        for cell in simplex.all_cells():
            if cell.key in self.cells:
                self.duplicates.append(cell.key)
                continue
            self.cells[cell.key] = cell

        self._components: dict[CellKey, dict[str, FormalComponent]] = {
            key: {c.id: c for c in cell.components} for key, cell in self.cells.items()
        }

    def has_object(self, vertex: int, object_id: str) -> bool:
        return 0 <= vertex < len(self.objects) and object_id in self.objects[vertex]

    def dim(self, vertex: int, object_id: str) -> int:
        return self.objects[vertex][object_id].dim

    def cell(self, key: CellKey) -> Optional[MorphismCell]:
        return self.cells.get(key)

    def component(self, key: CellKey, component_id: str) -> Optional[FormalComponent]:
        return self._components.get(key, {}).get(component_id)

    def resolve(
        self, cell: MorphismCell, label: FacetLabel, piece: FacetPiece
    ) -> Optional[list[tuple[CellKey, FormalComponent]]]:
        keys = piece_cells(cell.face, cell.source, cell.target, cell.energy, label)
        if keys is None or len(keys) != len(piece.components):
            return None

        resolved = []
        for key, component_id in zip(keys, piece.components):
            component = self.component(key, component_id)
            if component is None:
                return None
            resolved.append((key, component))

        return resolved


# Boundary reconstruction


@dataclass(frozen=True)
class BoundaryProduct:
    """A product of 0-dimensional components on the boundary of a 1-dimensional one."""

    label: FacetLabel
    factors: tuple[FormalComponent, ...]
    sign: int

    @property
    def contribution(self) -> int:
        value = self.sign
        for factor in self.factors:
            value *= factor.count
        return value


def interval_components(
    prefix: str,
    products: Sequence[BoundaryProduct],
    location: tuple[str, ...] = (),
) -> tuple[FormalComponent, ...]:
    """Group boundary products into 1-dimensional components whose ends cancel.

    Products with opposite contributions are paired into intervals first; the
    remaining products form a single component, which must cancel on its own.
    """

    pending = list(products)
    families: list[list[BoundaryProduct]] = []
    rest: list[BoundaryProduct] = []
    while pending:
        first = pending.pop(0)
        partner = None
        if first.contribution:
            partner = next(
                (o for o in pending if o.contribution == -first.contribution), None
            )
        if partner is None:
            rest.append(first)
            continue
        pending.remove(partner)
        families.append([first, partner])

    if rest:
        if sum(product.contribution for product in rest):
            raise FlowDataError(
                code=ErrorCode.FLOW_BOUNDARY_COUNT, location=tuple(location)
            )
        families.append(rest)

    components = []
    for i, family in enumerate(families):
        ranks = [sum(f.obstruction_rank for f in p.factors) for p in family]
        rank = max(ranks)
        grouped: dict[FacetLabel, list[FacetPiece]] = {}
        for product, own_rank in zip(family, ranks):
            grouped.setdefault(product.label, []).append(
                FacetPiece(
                    components=tuple(f.id for f in product.factors),
                    sign=product.sign,
                    added_rank=rank - own_rank,
                )
            )
        components.append(
            FormalComponent(
                id=f"{prefix}{i}",
                total_dim=rank + 1,
                obstruction_rank=rank,
                facets=tuple(
                    Facet(label=label, pieces=tuple(pieces))
                    for label, pieces in grouped.items()
                ),
                reconstructed=True,
            )
        )

    return tuple(components)


# Validation


def validate_flow_category(
    F: FlowCategory, ring: Ring = Ring.Z, threads: Optional[int] = None
) -> ValidationReport:
    """Check every axiom of a flow category on its formal data."""

    return validate_flow_simplex(FlowSimplex.point(F), ring=ring, threads=threads)


def validate_flow_simplex(
    S: FlowSimplex, ring: Ring = Ring.Z, threads: Optional[int] = None
) -> ValidationReport:
    """Check every axiom of a flow simplex, including each face."""

    index = CellIndex(S)
    violations: list[Violation] = []
    warnings: list[str] = []

    for vertex, object_id in index.duplicate_objects:
        violations.append(Violation.of(ErrorCode.INPUT_DUPLICATE_ID, vertex, object_id))
    for key in index.duplicates:
        violations.append(Violation.of(ErrorCode.INPUT_DUPLICATE_ID, *_show(key)))
    for i, vertex in enumerate(S.vertices):
        if vertex.gamma != S.gamma:
            violations.append(
                Violation.of(
                    ErrorCode.FLOW_GAMMA_MISMATCH,
                    i,
                    detail=f"vertex uses {vertex.gamma.value}, simplex {S.gamma.value}",
                )
            )

    results = parallel_map(
        lambda cell: _check_cell(index, cell, ring), list(index.cells.values()), threads
    )
    for cell_violations, cell_warnings in results:
        violations.extend(cell_violations)
        warnings.extend(cell_warnings)

    if violations:
        return ValidationReport.from_violations(violations, warnings)

    for i in range(len(S.vertices)):
        cycle = _energy_zero_cycle(index, i)
        if cycle:
            violations.append(Violation.of(ErrorCode.FLOW_ORDER_CYCLE, *cycle))

    identification, identification_warnings = _check_identifications(index, threads)
    violations.extend(identification)
    warnings.extend(identification_warnings)

    associativity, associativity_warnings = _check_codim2(index)
    violations.extend(associativity)
    warnings.extend(associativity_warnings)

    logger.debug(
        "Validated %d cells of a %d-simplex: %d violations",
        len(index.cells),
        S.dimension,
        len(violations),
    )
    return ValidationReport.from_violations(violations, _unique(warnings))


def _unique(items: Iterable[str]) -> list[str]:
    return list(dict.fromkeys(items))


def _show(key: CellKey) -> tuple[str, ...]:
    face, source, target, energy = key
    return ("".join(str(v) for v in face), source, target, format_rational(energy))


def _check_cell(
    index: CellIndex, cell: MorphismCell, ring: Ring
) -> tuple[list[Violation], list[str]]:
    violations: list[Violation] = []
    warnings: list[str] = []
    face = cell.face
    where = _show(cell.key)
    n = index.simplex.dimension

    if face[-1] > n:
        return [Violation.of(ErrorCode.FLOW_FACE_OUT_OF_RANGE, *where)], warnings

    if not index.has_object(face[0], cell.source) or not index.has_object(
        face[-1], cell.target
    ):
        return [Violation.of(ErrorCode.INPUT_UNKNOWN_REFERENCE, *where)], warnings

    if index.simplex.gamma == GammaKind.TRIVIAL and cell.energy != 0:
        violations.append(Violation.of(ErrorCode.FLOW_GAMMA_MISMATCH, *where))
    if len(face) == 1 and cell.energy < 0:
        violations.append(Violation.of(ErrorCode.FLOW_ENERGY_UNBOUNDED, *where))
    if (
        len(face) == 1
        and cell.source == cell.target
        and cell.energy == 0
        and cell.components
    ):
        violations.append(Violation.of(ErrorCode.FLOW_NOT_PROPER, *where))

    source_dim = index.dim(face[0], cell.source)
    target_dim = index.dim(face[-1], cell.target)
    if len(face) == 1 and cell.components and source_dim <= target_dim:
        warnings.append(f"cell {'/'.join(where)} is not graded connective")

    seen: set[str] = set()
    for component in cell.components:
        at = (*where, component.id)
        if component.id in seen:
            violations.append(Violation.of(ErrorCode.INPUT_DUPLICATE_ID, *at))
        seen.add(component.id)

        expected = _expected_vdim(face, source_dim, target_dim)
        if component.vdim != expected + component.index_bundle.value:
            violations.append(
                Violation.of(
                    ErrorCode.FLOW_FRAMING_MISMATCH,
                    *at,
                    detail=f"virtual dimension {component.vdim}, expected {expected}",
                )
            )

        violations.extend(_check_facets(index, cell, component, ring, warnings))

    return violations, warnings


def _check_facets(
    index: CellIndex,
    cell: MorphismCell,
    component: FormalComponent,
    ring: Ring,
    warnings: list[str],
) -> list[Violation]:
    violations: list[Violation] = []
    at = (*_show(cell.key), component.id)
    boundary = 0

    for facet in component.facets:
        label = facet.label
        if label.kind == FacetKind.BREAK:
            vertex = global_vertex(cell.face, label.through_vertex)
            if vertex in cell.face and not index.has_object(vertex, label.through):
                violations.append(
                    Violation.of(ErrorCode.INPUT_UNKNOWN_REFERENCE, *at, label.through)
                )
                continue

        for piece in facet.pieces:
            resolved = index.resolve(cell, label, piece)
            if resolved is None:
                code = (
                    ErrorCode.FLOW_MALFORMED
                    if piece_cells(
                        cell.face, cell.source, cell.target, cell.energy, label
                    )
                    is None
                    else ErrorCode.INPUT_UNKNOWN_REFERENCE
                )
                violations.append(
                    Violation.of(code, *at, detail=f"piece {list(piece.components)}")
                )
                continue

            factors = [c for _, c in resolved]
            if sum(c.vdim for c in factors) != component.vdim - 1:
                violations.append(
                    Violation.of(
                        ErrorCode.FLOW_FACET_DIMENSION,
                        *at,
                        detail=f"piece {list(piece.components)}",
                    )
                )
                continue

            total = sum(c.total_dim for c in factors) + piece.added_rank
            obstruction = sum(c.obstruction_rank for c in factors) + piece.added_rank
            if (
                total != component.total_dim - 1
                or obstruction != component.obstruction_rank
            ):
                violations.append(
                    Violation.of(
                        ErrorCode.FLOW_RANK_INCONSISTENT,
                        *at,
                        detail=f"piece {list(piece.components)}",
                    )
                )

            contribution = piece.sign
            for factor in factors:
                contribution *= factor.count
            boundary += contribution

    if component.vdim == 1:
        if not component.facets_available:
            warnings.append(f"facets unavailable for {'/'.join(at)}")
        elif not violations:
            cancels = boundary % 2 == 0 if ring == Ring.Z2 else boundary == 0
            if not cancels:
                violations.append(
                    Violation.of(
                        ErrorCode.FLOW_BOUNDARY_COUNT,
                        *at,
                        detail=f"signed boundary count {boundary}",
                    )
                )

    return violations


def _energy_zero_cycle(index: CellIndex, vertex: int) -> list[str]:
    graph = nx.DiGraph()
    graph.add_nodes_from(index.objects[vertex])
    for (face, source, target, energy), cell in index.cells.items():
        if face == (vertex,) and energy == 0 and cell.components and source != target:
            graph.add_edge(source, target)

    try:
        cycle = nx.find_cycle(graph)
    except nx.NetworkXNoCycle:
        return []

    return [edge[0] for edge in cycle]


def _label_key(face: FaceIndex, label: FacetLabel) -> tuple:
    if label.kind == FacetKind.BREAK:
        return (
            "break",
            global_vertex(face, label.through_vertex),
            label.through,
            label.energy_split,
        )

    return ("forget", label.index)


def _expected_products(index: CellIndex) -> dict[CellKey, Counter]:
    """All products of 0-dimensional components, keyed by the cell they bound."""

    expected: dict[CellKey, Counter] = defaultdict(Counter)
    by_start: dict[tuple[int, str], list[MorphismCell]] = defaultdict(list)
    for cell in index.cells.values():
        by_start[(cell.face[0], cell.source)].append(cell)

    for left in index.cells.values():
        left_points = [c.id for c in left.components if c.vdim == 0]
        if not left_points:
            continue
        vertex = left.face[-1]
        for right in by_start[(vertex, left.target)]:
            right_points = [c.id for c in right.components if c.vdim == 0]
            face = left.face + right.face[1:]
            key = (face, left.source, right.target, left.energy + right.energy)
            label = ("break", vertex, left.target, (left.energy, right.energy))
            for a in left_points:
                for b in right_points:
                    expected[key][(label, (a, b))] += 1

    n = index.simplex.dimension
    for cell in index.cells.values():
        points = [c.id for c in cell.components if c.vdim == 0]
        if len(cell.face) < 2 or not points:
            continue
        for k in range(cell.face[0] + 1, cell.face[-1]):
            if k in cell.face or k > n:
                continue
            face = tuple(sorted(cell.face + (k,)))
            key = (face, cell.source, cell.target, cell.energy)
            for c in points:
                expected[key][(("forget", k), (c,))] += 1

    return expected


def _check_identifications(
    index: CellIndex, threads: Optional[int]
) -> tuple[list[Violation], list[str]]:
    expected = _expected_products(index)
    keys = sorted(
        set(expected) | {k for k, c in index.cells.items() if c.components},
        key=lambda k: (k[0], k[1], k[2], k[3]),
    )

    def check(key: CellKey) -> tuple[Optional[Violation], Optional[str]]:
        cell = index.cell(key)
        observed: Counter = Counter()
        lines = [c for c in (cell.components if cell else ()) if c.vdim == 1]
        if any(not c.facets_available for c in lines):
            return None, f"identifications over {'/'.join(_show(key))} not checked"

        for component in lines:
            for facet in component.facets:
                label = _label_key(key[0], facet.label)
                for piece in facet.pieces:
                    observed[(label, piece.components)] += 1

        for product, _ in sorted(expected.get(key, Counter()).items(), key=repr):
            if observed[product] != 1:
                face, source, target, energy = key
                return (
                    Violation.of(
                        ErrorCode.FLOW_IDENTIFICATION,
                        source,
                        target,
                        detail=(
                            f"product {list(product[1])} appears {observed[product]}"
                            f" times over face {list(face)} at energy "
                            f"{format_rational(energy)}"
                        ),
                    ),
                    None,
                )

        return None, None

    violations: list[Violation] = []
    warnings: list[str] = []
    for violation, warning in parallel_map(check, keys, threads):
        if violation:
            violations.append(violation)
        if warning:
            warnings.append(warning)

    return violations, warnings


def _check_codim2(index: CellIndex) -> tuple[list[Violation], list[str]]:
    """Every codimension-2 stratum lies on exactly two facets."""

    violations: list[Violation] = []
    warnings: list[str] = []

    for key, cell in index.cells.items():
        for component in cell.components:
            if component.vdim < 2 or not component.facets:
                continue

            strata: Counter = Counter()
            complete = component.facets_available
            for facet in component.facets:
                outer = _label_key(cell.face, facet.label)[:3]
                for piece in facet.pieces:
                    resolved = index.resolve(cell, facet.label, piece)
                    if resolved is None:
                        continue
                    leaves = [(k, c.id) for k, c in resolved]
                    for position, (inner_key, inner) in enumerate(resolved):
                        if not inner.facets_available:
                            complete = False
                            continue
                        inner_cell = index.cells[inner_key]
                        for inner_facet in inner.facets:
                            label = _label_key(inner_key[0], inner_facet.label)[:3]
                            for inner_piece in inner_facet.pieces:
                                parts = index.resolve(
                                    inner_cell, inner_facet.label, inner_piece
                                )
                                if parts is None:
                                    continue
                                flat = (
                                    leaves[:position]
                                    + [(k, c.id) for k, c in parts]
                                    + leaves[position + 1 :]
                                )
                                strata[(frozenset((outer, label)), tuple(flat))] += 1

            at = (*_show(key), component.id)
            if not complete:
                warnings.append(f"codimension-2 strata of {'/'.join(at)} not checked")
                continue
            for stratum, seen in strata.items():
                if seen != 2:
                    leaves = [leaf for _, leaf in stratum[1]]
                    violations.append(
                        Violation.of(
                            ErrorCode.FLOW_ASSOCIATIVITY,
                            *at,
                            detail=f"stratum {leaves} lies on {seen} facets",
                        )
                    )
                    break

    return violations, warnings


# Structural operations


def _relabel_facets(
    component: FormalComponent,
    face: FaceIndex,
    vertex_map: Callable[[int], int],
) -> FormalComponent:
    facets = []
    for facet in component.facets:
        label = facet.label
        if label.kind == FacetKind.BREAK:
            vertex = vertex_map(global_vertex(face, label.through_vertex))
            label = label.model_copy(update={"through_vertex": vertex})
        else:
            label = label.model_copy(update={"index": vertex_map(label.index)})
        facets.append(facet.model_copy(update={"label": label}))

    return component.model_copy(update={"facets": tuple(facets)})


def relabel_cell(
    cell: MorphismCell, face: FaceIndex, vertex_map: Callable[[int], int]
) -> MorphismCell:
    return cell.model_copy(
        update={
            "face": face,
            "components": tuple(
                _relabel_facets(c, cell.face, vertex_map) for c in cell.components
            ),
        }
    )


def face(S: FlowSimplex, i: int) -> FlowSimplex:
    """The face of ``S`` opposite vertex ``i``."""

    if S.dimension == 0 or not 0 <= i <= S.dimension:
        raise FlowDataError(
            f"Face {i} of a {S.dimension}-simplex does not exist.",
            ErrorCode.FLOW_FACE_OUT_OF_RANGE,
        )

    def renumber(m: int) -> int:
        return m - 1 if m > i else m

    cells = tuple(
        relabel_cell(cell, tuple(renumber(m) for m in cell.face), renumber)
        for cell in S.cells
        if i not in cell.face
    )
    vertices = S.vertices[:i] + S.vertices[i + 1 :]
    return FlowSimplex(
        dimension=S.dimension - 1,
        gamma=S.gamma,
        vertices=vertices,
        cells=tuple(c for c in cells if len(c.face) > 1),
    )


def _flip(position_shift: int, sign: int) -> int:
    return -sign if position_shift % 2 else sign


def _degenerate_component(
    cell: MorphismCell, component: FormalComponent, j: int, new_face: FaceIndex
) -> FormalComponent:
    """The component ``[0, 1] x Y`` over the face with vertex ``j`` doubled."""

    def lift(m: int) -> int:
        return m + 1 if m > j else m

    facets: list[Facet] = []
    for facet in component.facets:
        label = facet.label
        if label.kind == FacetKind.BREAK:
            m = global_vertex(cell.face, label.through_vertex)
            old = cell.face.index(m)
            if m == j:
                splits = [
                    (j, lambda a, b: (a, degenerate_id(b))),
                    (j + 1, lambda a, b: (degenerate_id(a), b)),
                ]
            elif m < j:
                splits = [(m, lambda a, b: (a, degenerate_id(b)))]
            else:
                splits = [(m + 1, lambda a, b: (degenerate_id(a), b))]

            for vertex, rename in splits:
                shift = new_face.index(vertex) - old
                facets.append(
                    Facet(
                        label=label.model_copy(update={"through_vertex": vertex}),
                        pieces=tuple(
                            piece.model_copy(
                                update={
                                    "components": rename(*piece.components),
                                    "sign": _flip(shift, piece.sign),
                                }
                            )
                            for piece in facet.pieces
                        ),
                    )
                )
        else:
            k = lift(label.index)
            shift = new_face.index(k) - cell.face.index(label.index)
            facets.append(
                Facet(
                    label=label.model_copy(update={"index": k}),
                    pieces=tuple(
                        piece.model_copy(
                            update={
                                "components": (degenerate_id(piece.components[0]),),
                                "sign": _flip(shift, piece.sign),
                            }
                        )
                        for piece in facet.pieces
                    ),
                )
            )

    first = new_face.index(j)
    energy = cell.energy
    if j + 1 == new_face[-1]:
        end = FacetLabel.breaking(cell.target, j, (energy, Fraction(0)))
        facets.append(
            Facet(
                label=end,
                pieces=(
                    FacetPiece(
                        components=(component.id, unit_id(cell.target)),
                        sign=facet_sign(new_face, end),
                    ),
                ),
            )
        )
    else:
        end = FacetLabel.forgetting(j + 1)
        facets.append(
            Facet(
                label=end,
                pieces=(
                    FacetPiece(
                        components=(component.id,),
                        sign=facet_sign(new_face, end),
                    ),
                ),
            )
        )

    if first == 0:
        start = FacetLabel.breaking(cell.source, j + 1, (Fraction(0), energy))
        facets.append(
            Facet(
                label=start,
                pieces=(
                    FacetPiece(
                        components=(unit_id(cell.source), component.id),
                        sign=facet_sign(new_face, start),
                    ),
                ),
            )
        )
    else:
        start = FacetLabel.forgetting(j)
        facets.append(
            Facet(
                label=start,
                pieces=(
                    FacetPiece(
                        components=(component.id,), sign=facet_sign(new_face, start)
                    ),
                ),
            )
        )

    return component.model_copy(
        update={
            "id": degenerate_id(component.id),
            "total_dim": component.total_dim + 1,
            "count": 0,
            "facets": tuple(facets),
        }
    )


def _degeneracy(S: FlowSimplex, j: int) -> FlowSimplex:
    """Duplicate vertex ``j``, which must be the first or the last vertex."""

    if j not in (0, S.dimension):
        raise FlowDataError(
            f"Degeneracy {j} of a {S.dimension}-simplex is not an outer one.",
            ErrorCode.FLOW_FACE_OUT_OF_RANGE,
        )

    vertices = S.vertices[: j + 1] + S.vertices[j:]
    cells: list[MorphismCell] = []

    for obj in S.vertices[j].objects:
        cells.append(
            MorphismCell(
                face=(j, j + 1),
                source=obj.id,
                target=obj.id,
                components=(FormalComponent(id=unit_id(obj.id), total_dim=0, count=1),),
            )
        )

    for cell in S.all_cells():
        old_face = cell.face
        lifts: list[FaceIndex] = []
        if j in old_face:
            below = tuple(m for m in old_face if m < j)
            above = tuple(m + 1 for m in old_face if m > j)
            lifts = [below + (j,) + above, below + (j + 1,) + above]
        else:
            lifts = [tuple(m + 1 if m > j else m for m in old_face)]

        for new_face in lifts:
            if len(new_face) == 1:
                continue
            lookup = dict(zip(old_face, new_face))
            cells.append(relabel_cell(cell, new_face, lookup.__getitem__))

        if j in old_face:
            below = tuple(m for m in old_face if m < j)
            above = tuple(m + 1 for m in old_face if m > j)
            new_face = below + (j, j + 1) + above
            cells.append(
                cell.model_copy(
                    update={
                        "face": new_face,
                        "components": tuple(
                            _degenerate_component(cell, c, j, new_face)
                            for c in cell.components
                        ),
                    }
                )
            )

    return FlowSimplex(
        dimension=S.dimension + 1,
        gamma=S.gamma,
        vertices=vertices,
        cells=tuple(_merge_cells(cells)),
    )


def _merge_cells(cells: Iterable[MorphismCell]) -> list[MorphismCell]:
    merged: dict[CellKey, MorphismCell] = {}
    for cell in cells:
        if cell.key in merged:
            previous = merged[cell.key]
            cell = previous.model_copy(
                update={"components": previous.components + cell.components}
            )
        merged[cell.key] = cell

    return list(merged.values())


def s0(S: FlowSimplex) -> FlowSimplex:
    """The initially degenerate simplex: vertex 0 doubled."""

    return _degeneracy(S, 0)


def sn(S: FlowSimplex) -> FlowSimplex:
    """The terminally degenerate simplex: the last vertex doubled.

    On simplices of the form ``s0(T)`` this is redefined as ``s0(sn(T))``.
    """

    if S.dimension >= 1:
        rest = face(S, 0)
        if canonical_form(s0(rest)) == canonical_form(S):
            return s0(sn(rest))

    return _degeneracy(S, S.dimension)


def diagonal(F: FlowCategory) -> FlowBimodule:
    """The diagonal bimodule of ``F``: units plus a collar of every component."""

    return FlowBimodule.from_simplex(s0(FlowSimplex.point(F)))


def restrict_objects(
    F: FlowCategory, predicate: Callable[[FlowObject], bool]
) -> FlowCategory:
    """The full sub-flow-category on the objects satisfying ``predicate``."""

    kept = {obj.id for obj in F.objects if predicate(obj)}
    dropped_facets = 0
    morphisms = []
    for cell in F.morphisms:
        if cell.source not in kept or cell.target not in kept:
            continue
        components = []
        for component in cell.components:
            facets = tuple(
                f
                for f in component.facets
                if f.label.kind != FacetKind.BREAK or f.label.through in kept
            )
            dropped_facets += len(component.facets) - len(facets)
            components.append(component.model_copy(update={"facets": facets}))
        morphisms.append(cell.model_copy(update={"components": tuple(components)}))

    if dropped_facets:
        logger.warning(
            "Restriction dropped %d facets breaking through removed objects",
            dropped_facets,
        )

    return F.model_copy(
        update={
            "objects": tuple(obj for obj in F.objects if obj.id in kept),
            "morphisms": tuple(morphisms),
        }
    )


def suspend(F: FlowCategory, sign: int = 1) -> FlowCategory:
    """Shift every object by a trivial line: plus+1 for sign 1, minus+1 for -1."""

    if sign not in (1, -1):
        raise FlowDataError(
            f"Suspension sign must be 1 or -1, got {sign}.", ErrorCode.FLOW_MALFORMED
        )

    objects = []
    for obj in F.objects:
        if sign == 1:
            vdim = VirtualDim(plus=obj.vdim.plus + 1, minus=obj.vdim.minus)
        else:
            vdim = VirtualDim(plus=obj.vdim.plus, minus=obj.vdim.minus + 1)
        objects.append(FlowObject(id=obj.id, vdim=vdim, dim=obj.dim + sign))

    return F.model_copy(update={"objects": tuple(objects)})


def negate_counts(F: FlowCategory) -> FlowCategory:
    """Flip the sign of every point count."""

    morphisms = tuple(
        cell.model_copy(
            update={
                "components": tuple(
                    c.model_copy(update={"count": -c.count}) for c in cell.components
                )
            }
        )
        for cell in F.morphisms
    )
    return F.model_copy(update={"morphisms": morphisms})


def suspend_bimodule(B: FlowBimodule) -> FlowBimodule:
    """``B`` between the signed suspensions of its source and target."""

    return FlowBimodule(
        gamma=B.gamma,
        vertices=(negate_counts(suspend(B.left)), negate_counts(suspend(B.right))),
        cells=B.cells,
    )


def energy_shift(B: FlowSimplex) -> Fraction:
    """Smallest canonical shift making every energy of ``B`` positive."""

    if B.gamma == GammaKind.TRIVIAL or not B.cells:
        return Fraction(0)

    lowest = min(cell.energy for cell in B.cells)
    return abs(lowest) + 1 if lowest < 0 else Fraction(0)


def _prefixed(
    cell: MorphismCell,
    prefixes: dict[int, str],
    face: FaceIndex,
    shift: Fraction = Fraction(0),
    vertex_map: Optional[Callable[[int], int]] = None,
    sign_map: Optional[Callable[[int], int]] = None,
) -> MorphismCell:
    """Rename objects vertex by vertex and move the cell to ``face``.

    ``prefixes`` maps original vertices to object-id prefixes; ``shift`` is
    added to the energy and to the right-hand part of every left break.
    """

    vertex_map = vertex_map or (lambda m: m)
    sign_map = sign_map or (lambda m: 1)
    first, last = cell.face[0], cell.face[-1]

    components = []
    for component in cell.components:
        facets = []
        for facet in component.facets:
            label = facet.label
            flip = 1
            if label.kind == FacetKind.BREAK:
                vertex = global_vertex(cell.face, label.through_vertex)
                left, right = label.energy_split
                if vertex == first:
                    right += shift
                else:
                    left += shift
                label = label.model_copy(
                    update={
                        "through": prefixes.get(vertex, "") + label.through,
                        "through_vertex": vertex_map(vertex),
                        "energy_split": (left, right),
                    }
                )
                flip = sign_map(vertex)
            pieces = tuple(
                piece.model_copy(update={"sign": piece.sign * flip})
                for piece in facet.pieces
            )
            facets.append(Facet(label=label, pieces=pieces))
        components.append(component.model_copy(update={"facets": tuple(facets)}))

    return MorphismCell(
        face=face,
        source=prefixes.get(first, "") + cell.source,
        target=prefixes.get(last, "") + cell.target,
        energy=cell.energy + shift,
        components=tuple(components),
    )


def _prefixed_category(F: FlowCategory, prefix: str) -> FlowCategory:
    return F.model_copy(
        update={
            "objects": tuple(
                obj.model_copy(update={"id": prefix + obj.id}) for obj in F.objects
            ),
            "morphisms": tuple(
                _prefixed(cell.model_copy(update={"face": (0,)}), {0: prefix}, (0,))
                for cell in F.morphisms
            ),
        }
    )


@dataclass(frozen=True)
class ConeData:
    """The cone of a bimodule ``B: X -> Y`` with its structure maps.

    ``include`` goes from Y to the cone, ``project`` from the cone to the
    signed suspension of X, and ``shifted`` is B between the signed
    suspensions of X and Y.
    """

    category: FlowCategory
    include: FlowBimodule
    project: FlowBimodule
    shifted: FlowBimodule
    gamma: Fraction

    @property
    def shifted_source(self) -> FlowCategory:
        return self.shifted.left

    @property
    def shifted_target(self) -> FlowCategory:
        return self.shifted.right


def cone(B: FlowBimodule, check: bool = True) -> ConeData:
    """Glue the suspended source of ``B`` to its target along ``B``."""

    if B.dimension != 1:
        raise FlowDataError(code=ErrorCode.FLOW_NOT_A_BIMODULE)

    if check:
        report = validate_flow_simplex(B)
        if not report.ok:
            first = report.first
            raise FlowDataError(first.message, first.code, first.location)

    gamma = energy_shift(B)
    shifted = suspend_bimodule(B)
    source_block = _prefixed_category(shifted.left, CONE_SOURCE_PREFIX)
    target_block = _prefixed_category(B.right, CONE_TARGET_PREFIX)

    glued = tuple(
        _prefixed(
            cell,
            {0: CONE_SOURCE_PREFIX, 1: CONE_TARGET_PREFIX},
            (0,),
            shift=gamma,
            vertex_map=lambda m: 0,
            sign_map=lambda m: -1 if m == 1 else 1,
        )
        for cell in B.middle()
    )
    category = FlowCategory(
        gamma=B.gamma,
        objects=source_block.objects + target_block.objects,
        morphisms=source_block.morphisms + target_block.morphisms + glued,
    )

    include = FlowBimodule(
        gamma=B.gamma,
        vertices=(B.right, category),
        cells=tuple(
            _prefixed(cell, {1: CONE_TARGET_PREFIX}, cell.face)
            for cell in diagonal(B.right).cells
        ),
    )
    project = FlowBimodule(
        gamma=B.gamma,
        vertices=(category, shifted.left),
        cells=tuple(
            _prefixed(cell, {0: CONE_SOURCE_PREFIX}, cell.face)
            for cell in diagonal(shifted.left).cells
        ),
    )

    logger.debug(
        "Cone of a bimodule with %d cells: %d objects, energy shift %s",
        len(B.cells),
        len(category.objects),
        gamma,
    )
    return ConeData(
        category=category,
        include=include,
        project=project,
        shifted=shifted,
        gamma=gamma,
    )


# Canonical form


def _label_sort_key(label: FacetLabel) -> str:
    return json.dumps(label.model_dump(mode="json"), sort_keys=True)


def _canonical_cell(cell: MorphismCell) -> MorphismCell:
    components = []
    for component in sorted(cell.components, key=lambda c: c.id):
        facets = sorted(
            (
                facet.model_copy(
                    update={
                        "pieces": tuple(
                            sorted(
                                facet.pieces,
                                key=lambda p: (p.components, p.sign, p.added_rank),
                            )
                        )
                    }
                )
                for facet in component.facets
            ),
            key=lambda f: _label_sort_key(f.label),
        )
        components.append(component.model_copy(update={"facets": tuple(facets)}))

    return cell.model_copy(update={"components": tuple(components)})


def _sorted_cells(cells: Iterable[MorphismCell]) -> tuple[MorphismCell, ...]:
    return tuple(_canonical_cell(c) for c in sorted(cells, key=lambda c: c.key))


def canonical_category(F: FlowCategory) -> FlowCategory:
    return F.model_copy(
        update={
            "objects": tuple(sorted(F.objects, key=lambda o: o.id)),
            "morphisms": _sorted_cells(F.morphisms),
        }
    )


def canonical_form(S: Union[FlowCategory, FlowSimplex]) -> dict:
    """Order-independent dump used for structural equality."""

    if isinstance(S, FlowCategory):
        return canonical_category(S).model_dump(mode="json", by_alias=True)

    canonical = S.model_copy(
        update={
            "vertices": tuple(canonical_category(v) for v in S.vertices),
            "cells": _sorted_cells(S.cells),
        }
    )
    data = canonical.model_dump(mode="json", by_alias=True)
    data["schema"] = "flowcat-simplex-v1"
    return data
