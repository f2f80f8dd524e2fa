"""Flow bimodules as 1-simplices: composition, homotopies and cone null-homotopies."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import sympy

from .constants import CONE_SOURCE_PREFIX, CONE_TARGET_PREFIX, Ring
from .error_codes import ErrorCode
from .exceptions import BimoduleError
from .flow_data import (
    BoundaryProduct,
    CellIndex,
    ConeData,
    canonical_form,
    cone,
    degenerate_id,
    facet_sign,
    global_vertex,
    interval_components,
    relabel_cell,
    unit_id,
)
from .homology import chain_complex, chain_map, count_matrix, modulus_of
from .linalg import reduce_matrix
from .models import (
    Facet,
    FacetLabel,
    FacetPiece,
    FlowBimodule,
    FlowSimplex,
    FormalComponent,
    MorphismCell,
)

logger = logging.getLogger(__name__)

# (face, source, target, energy, id); middle-category components use face "mid".
Handle = tuple


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict = {}

    def add(self, item) -> None:
        self.parent.setdefault(item, item)

    def find(self, item):
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass(frozen=True)
class _Product:
    left: Handle
    right: Handle
    a: FormalComponent
    b: FormalComponent
    through: str

    @property
    def key(self) -> tuple[Handle, Handle]:
        return (self.left, self.right)

    @property
    def source(self) -> str:
        return self.left[1]

    @property
    def target(self) -> str:
        return self.right[2]

    @property
    def energy(self) -> Fraction:
        return self.left[3] + self.right[3]

    @property
    def vdim(self) -> int:
        return self.a.vdim + self.b.vdim


def _handle(cell: MorphismCell, component_id: str) -> Handle:
    return (cell.face, cell.source, cell.target, cell.energy, component_id)


def _key_handle(key, component_id: str, middle: bool = False) -> Handle:
    face, source, target, energy = key
    return ("mid" if middle else face, source, target, energy, component_id)


def compose_bimodules(B12: FlowBimodule, B23: FlowBimodule) -> FlowBimodule:
    """Glue ``B12 x B23`` over the middle category into a bimodule X -> Z.

    Products are merged whenever they share a stratum broken through the
    middle category; every class becomes one component of the composite.
    """

    if canonical_form(B12.right) != canonical_form(B23.left):
        raise BimoduleError(code=ErrorCode.BIMODULE_MIDDLE_MISMATCH)
    if B12.gamma != B23.gamma:
        raise BimoduleError(code=ErrorCode.FLOW_GAMMA_MISMATCH)

    first, second = CellIndex(B12), CellIndex(B23)
    starting: dict[str, list[MorphismCell]] = defaultdict(list)
    for cell in B23.middle():
        starting[cell.source].append(cell)

    products: list[_Product] = []
    for left_cell in sorted(B12.middle(), key=lambda c: c.key):
        for right_cell in sorted(starting[left_cell.target], key=lambda c: c.key):
            for a in left_cell.components:
                for b in right_cell.components:
                    products.append(
                        _Product(
                            _handle(left_cell, a.id),
                            _handle(right_cell, b.id),
                            a,
                            b,
                            left_cell.target,
                        )
                    )

    forest = _UnionFind()
    for product in products:
        forest.add(product.key)

    strata: dict[tuple, list[tuple[Handle, Handle]]] = defaultdict(list)
    incomplete: set[tuple[Handle, Handle]] = set()
    for product in products:
        left_cell = first.cells[product.left[:4]]
        right_cell = second.cells[product.right[:4]]
        if (not product.a.facets_available and product.a.vdim > 0) or (
            not product.b.facets_available and product.b.vdim > 0
        ):
            incomplete.add(product.key)

        for facet in product.a.facets:
            if global_vertex(left_cell.face, facet.label.through_vertex) != 1:
                continue
            for piece in facet.pieces:
                resolved = first.resolve(left_cell, facet.label, piece)
                if resolved is None:
                    continue
                (key_a, a1), (key_y, y) = resolved
                stratum = (
                    _key_handle(key_a, a1.id),
                    _key_handle(key_y, y.id, middle=True),
                    product.right,
                )
                strata[stratum].append(product.key)

        for facet in product.b.facets:
            if global_vertex(right_cell.face, facet.label.through_vertex) != 0:
                continue
            for piece in facet.pieces:
                resolved = second.resolve(right_cell, facet.label, piece)
                if resolved is None:
                    continue
                (key_y, y), (key_b, b1) = resolved
                stratum = (
                    product.left,
                    _key_handle(key_y, y.id, middle=True),
                    _key_handle(key_b, b1.id),
                )
                strata[stratum].append(product.key)

    for stratum, members in strata.items():
        if len(members) != 2:
            incomplete.update(members)
        for other in members[1:]:
            forest.union(members[0], other)

    classes: dict[tuple, list[_Product]] = defaultdict(list)
    for product in products:
        classes[forest.find(product.key)].append(product)

    class_id: dict[tuple[Handle, Handle], str] = {}
    taken: set[tuple] = set()
    ordered = sorted(classes.values(), key=lambda ms: min(m.key for m in ms))
    for members in ordered:
        head = min(members, key=lambda m: m.key)
        cell_key = (head.source, head.target, head.energy)
        base = name = f"{head.a.id}*{head.b.id}"
        suffix = 1
        while (cell_key, name) in taken:
            name = f"{base}#{suffix}"
            suffix += 1
        taken.add((cell_key, name))
        for member in members:
            class_id[member.key] = name

    cells: dict[tuple, list[FormalComponent]] = defaultdict(list)
    for members in ordered:
        head = min(members, key=lambda m: m.key)
        dims = {
            (m.a.total_dim + m.b.total_dim, m.a.obstruction_rank + m.b.obstruction_rank)
            for m in members
        }
        if len(dims) != 1:
            raise BimoduleError(
                code=ErrorCode.FLOW_FACET_DIMENSION,
                location=(head.source, head.target, class_id[head.key]),
            )
        if head.vdim == 0 and len(members) != 1:
            raise BimoduleError(
                code=ErrorCode.FLOW_IDENTIFICATION,
                location=(head.source, head.target, class_id[head.key]),
            )

        total, obstruction = dims.pop()
        facets = _lifted_facets(members, class_id, first, second)
        cells[(head.source, head.target, head.energy)].append(
            FormalComponent(
                id=class_id[head.key],
                total_dim=total,
                obstruction_rank=obstruction,
                count=head.a.count * head.b.count if head.vdim == 0 else 0,
                facets=facets,
                facets_available=not any(m.key in incomplete for m in members),
            )
        )

    if incomplete:
        logger.warning(
            "Composite of bimodules: %d products with unpaired or missing facet data",
            len(incomplete),
        )

    logger.debug(
        "Composed bimodules: %d products in %d classes", len(products), len(ordered)
    )
    return FlowBimodule(
        gamma=B12.gamma,
        vertices=(B12.left, B23.right),
        cells=tuple(
            MorphismCell(
                face=(0, 1), source=p, target=r, energy=energy, components=tuple(comps)
            )
            for (p, r, energy), comps in sorted(cells.items())
        ),
    )


def _lifted_facets(
    members: list[_Product],
    class_id: dict[tuple[Handle, Handle], str],
    first: CellIndex,
    second: CellIndex,
) -> tuple[Facet, ...]:
    """Facets of a class: left actions on the first factor, right on the second."""

    grouped: dict[FacetLabel, list[FacetPiece]] = {}
    for member in members:
        left_cell = first.cells[member.left[:4]]
        right_cell = second.cells[member.right[:4]]
        right_energy = member.right[3]
        left_energy = member.left[3]

        for facet in member.a.facets:
            if global_vertex(left_cell.face, facet.label.through_vertex) != 0:
                continue
            l1, l2 = facet.label.energy_split
            label = FacetLabel.breaking(facet.label.through, 0, (l1, l2 + right_energy))
            for piece in facet.pieces:
                resolved = first.resolve(left_cell, facet.label, piece)
                if resolved is None:
                    continue
                (_, x), (key_a, a2) = resolved
                rest = class_id.get((_key_handle(key_a, a2.id), member.right))
                if rest is None:
                    continue
                new_piece = FacetPiece(
                    components=(x.id, rest),
                    sign=piece.sign,
                    added_rank=piece.added_rank,
                )
                pieces = grouped.setdefault(label, [])
                if new_piece not in pieces:
                    pieces.append(new_piece)

        for facet in member.b.facets:
            if global_vertex(right_cell.face, facet.label.through_vertex) != 1:
                continue
            m1, m2 = facet.label.energy_split
            label = FacetLabel.breaking(facet.label.through, 1, (left_energy + m1, m2))
            for piece in facet.pieces:
                resolved = second.resolve(right_cell, facet.label, piece)
                if resolved is None:
                    continue
                (key_b, b2), (_, w) = resolved
                rest = class_id.get((member.left, _key_handle(key_b, b2.id)))
                if rest is None:
                    continue
                new_piece = FacetPiece(
                    components=(rest, w.id),
                    sign=piece.sign,
                    added_rank=piece.added_rank,
                )
                pieces = grouped.setdefault(label, [])
                if new_piece not in pieces:
                    pieces.append(new_piece)

    return tuple(Facet(label=label, pieces=tuple(p)) for label, p in grouped.items())


# Homotopies


@dataclass(frozen=True)
class TwoSimplexHomotopy:
    """A flow 2-simplex with the chain homotopy read off its top stratum.

    ``d0 * homotopy + homotopy * d2 == f01 * f12 - f02`` over ``ring``.
    """

    simplex: FlowSimplex
    ring: Ring
    homotopy: sympy.Matrix
    f01: sympy.Matrix
    f12: sympy.Matrix
    f02: sympy.Matrix

    @property
    def composite(self) -> sympy.Matrix:
        return reduce_matrix(self.f01 * self.f12, modulus_of(self.ring))


def homotopy_from_2simplex(H: FlowSimplex, ring: Ring = Ring.Z) -> TwoSimplexHomotopy:
    """Extract and verify the homotopy carried by a flow 2-simplex."""

    if H.dimension != 2:
        raise BimoduleError(
            f"Expected a 2-simplex, got dimension {H.dimension}.",
            ErrorCode.FLOW_MALFORMED,
        )

    complexes = [chain_complex(v, ring) for v in H.vertices]
    ids = [c.ids for c in complexes]

    def counts(face: tuple[int, ...]) -> sympy.Matrix:
        return count_matrix(H.cells_of(face), ids[face[0]], ids[face[-1]], ring)

    f01, f12, f02 = counts((0, 1)), counts((1, 2)), counts((0, 2))
    h = counts((0, 1, 2))
    d0, d2 = complexes[0].differential, complexes[2].differential

    residual = reduce_matrix(d0 * h + h * d2 - (f01 * f12 - f02), modulus_of(ring))
    for i in range(residual.rows):
        for j in range(residual.cols):
            if residual[i, j]:
                raise BimoduleError(
                    code=ErrorCode.BIMODULE_HOMOTOPY_RESIDUAL,
                    location=(ids[0][i], ids[2][j]),
                    residual=residual,
                )

    return TwoSimplexHomotopy(
        simplex=H, ring=ring, homotopy=h, f01=f01, f12=f12, f02=f02
    )


def _move(cells: tuple[MorphismCell, ...], shift: int) -> tuple[MorphismCell, ...]:
    """Carry bimodule cells from the face (0, 1) to (shift, shift + 1)."""

    return tuple(
        relabel_cell(
            cell, tuple(m + shift for m in cell.face), lambda m: m + shift
        )
        for cell in cells
    )


def _unit(face, source: str, target: str, energy: Fraction, name: str) -> MorphismCell:
    return MorphismCell(
        face=face,
        source=source,
        target=target,
        energy=energy,
        components=(FormalComponent(id=unit_id(name), total_dim=0, count=1),),
    )


def _collar(
    component: FormalComponent,
    face: tuple[int, ...],
    ends: list[tuple[FacetLabel, tuple[str, str]]],
) -> FormalComponent:
    """``[0, 1] x component``; facets are kept only when the result is 1-dimensional."""

    if component.vdim + 1 != 1:
        return component.model_copy(
            update={
                "id": degenerate_id(component.id),
                "total_dim": component.total_dim + 1,
                "count": 0,
                "facets": (),
                "facets_available": False,
            }
        )

    facets = tuple(
        Facet(
            label=label,
            pieces=(FacetPiece(components=pieces, sign=facet_sign(face, label)),),
        )
        for label, pieces in ends
    )
    return component.model_copy(
        update={
            "id": degenerate_id(component.id),
            "total_dim": component.total_dim + 1,
            "count": 0,
            "facets": facets,
            "facets_available": True,
        }
    )


def _top_cell(face, source, target, energy, components) -> MorphismCell:
    return MorphismCell(
        face=face,
        source=source,
        target=target,
        energy=energy,
        components=tuple(components),
    )


def _nonempty(cells):
    return [cell for cell in cells if cell.components]


def null_homotopy_IB(B: FlowBimodule, data: Optional[ConeData] = None) -> FlowSimplex:
    """The 2-simplex (X, Y, C) between ``include o B`` and zero."""

    data = data or cone(B)
    gamma = data.gamma
    top = (0, 1, 2)
    cells: list[MorphismCell] = []

    for obj in B.left.objects:
        cells.append(_unit(top, obj.id, CONE_SOURCE_PREFIX + obj.id, -gamma, obj.id))

    for cell in _nonempty(B.left.morphisms):
        p, q, energy = cell.source, cell.target, cell.energy
        collars = [
            _collar(
                x,
                top,
                [
                    (FacetLabel.breaking(q, 0, (energy, -gamma)), (x.id, unit_id(q))),
                    (
                        FacetLabel.breaking(
                            CONE_SOURCE_PREFIX + q, 2, (-gamma, energy)
                        ),
                        (unit_id(p), x.id),
                    ),
                ],
            )
            for x in cell.components
        ]
        cells.append(
            _top_cell(top, p, CONE_SOURCE_PREFIX + q, energy - gamma, collars)
        )

    for cell in _nonempty(B.middle()):
        p, r, energy = cell.source, cell.target, cell.energy
        collars = [
            _collar(
                z,
                top,
                [
                    (
                        FacetLabel.breaking(
                            CONE_SOURCE_PREFIX + p, 2, (-gamma, energy + gamma)
                        ),
                        (unit_id(p), z.id),
                    ),
                    (
                        FacetLabel.breaking(r, 1, (energy, Fraction(0))),
                        (z.id, unit_id(r)),
                    ),
                ],
            )
            for z in cell.components
        ]
        cells.append(_top_cell(top, p, CONE_TARGET_PREFIX + r, energy, collars))

    return FlowSimplex(
        dimension=2,
        gamma=B.gamma,
        vertices=(B.left, B.right, data.category),
        cells=B.cells + _move(data.include.cells, 1) + tuple(cells),
    )


def null_homotopy_BP(B: FlowBimodule, data: Optional[ConeData] = None) -> FlowSimplex:
    """The 2-simplex (C, SX, SY) between ``shifted B o project`` and zero."""

    data = data or cone(B)
    gamma = data.gamma
    top = (0, 1, 2)
    cells: list[MorphismCell] = []

    for obj in B.right.objects:
        cells.append(_unit(top, CONE_TARGET_PREFIX + obj.id, obj.id, -gamma, obj.id))

    for cell in _nonempty(B.right.morphisms):
        r, s, energy = cell.source, cell.target, cell.energy
        collars = [
            _collar(
                y,
                top,
                [
                    (
                        FacetLabel.breaking(
                            CONE_TARGET_PREFIX + s, 0, (energy, -gamma)
                        ),
                        (y.id, unit_id(s)),
                    ),
                    (FacetLabel.breaking(r, 2, (-gamma, energy)), (unit_id(r), y.id)),
                ],
            )
            for y in cell.components
        ]
        cells.append(
            _top_cell(top, CONE_TARGET_PREFIX + r, s, energy - gamma, collars)
        )

    for cell in _nonempty(B.middle()):
        p, r, energy = cell.source, cell.target, cell.energy
        collars = [
            _collar(
                z,
                top,
                [
                    (
                        FacetLabel.breaking(
                            CONE_TARGET_PREFIX + r, 0, (energy + gamma, -gamma)
                        ),
                        (z.id, unit_id(r)),
                    ),
                    (
                        FacetLabel.breaking(p, 1, (Fraction(0), energy)),
                        (unit_id(p), z.id),
                    ),
                ],
            )
            for z in cell.components
        ]
        cells.append(_top_cell(top, CONE_SOURCE_PREFIX + p, r, energy, collars))

    return FlowSimplex(
        dimension=2,
        gamma=B.gamma,
        vertices=(data.category, data.shifted_source, data.shifted_target),
        cells=data.project.cells + _move(data.shifted.cells, 1) + tuple(cells),
    )


def null_homotopy_PI(B: FlowBimodule, data: Optional[ConeData] = None) -> FlowSimplex:
    """The 2-simplex (Y, C, SX); ``project o include`` vanishes on the nose."""

    data = data or cone(B)
    return FlowSimplex(
        dimension=2,
        gamma=B.gamma,
        vertices=(B.right, data.category, data.shifted_source),
        cells=data.include.cells + _move(data.project.cells, 1),
    )


def chain_level_composite(B12: FlowBimodule, B23: FlowBimodule, ring: Ring = Ring.Z):
    """The matrix product of the two chain maps, for comparison with a composite."""

    return reduce_matrix(chain_map(B12, ring) * chain_map(B23, ring), modulus_of(ring))


def is_empty(S: FlowSimplex) -> bool:
    return not any(cell.components for cell in S.all_cells()) and not any(
        v.objects for v in S.vertices
    )


def interval_top_cells(
    B12: FlowBimodule, B23: FlowBimodule, composite: FlowBimodule
) -> tuple[MorphismCell, ...]:
    """Top cells of the 2-simplex spanned by two bimodules and their composite.

    Every 0-dimensional product over the middle vertex bounds an interval
    whose other end is the composite component it was glued into.
    """

    face = (0, 1, 2)
    starting: dict[str, list[MorphismCell]] = defaultdict(list)
    for cell in B23.middle():
        starting[cell.source].append(cell)

    ends: dict[tuple, list[BoundaryProduct]] = defaultdict(list)
    for left in B12.middle():
        for right in starting[left.target]:
            label = FacetLabel.breaking(left.target, 1, (left.energy, right.energy))
            key = (left.source, right.target, left.energy + right.energy)
            for a in left.components:
                for b in right.components:
                    if a.vdim == 0 and b.vdim == 0:
                        ends[key].append(
                            BoundaryProduct(label, (a, b), facet_sign(face, label))
                        )

    forget = FacetLabel.forgetting(1)
    for cell in composite.middle():
        for component in cell.components:
            if component.vdim == 0:
                ends[(cell.source, cell.target, cell.energy)].append(
                    BoundaryProduct(forget, (component,), facet_sign(face, forget))
                )

    return tuple(
        _top_cell(
            face,
            p,
            r,
            energy,
            interval_components(f"h:{p}:{r}:", found, location=(p, r)),
        )
        for (p, r, energy), found in sorted(ends.items())
    )
