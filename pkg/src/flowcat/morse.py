"""Discrete Morse theory on finite simplicial complexes.

Cells are sorted tuples of vertex labels. Matrices use the row convention of
the flow data: ``D[tau][sigma]`` is the incidence ``(-1)**i`` of the face
``sigma`` obtained by dropping the vertex in position ``i`` of ``tau``.

A matching pairs a cell ``sigma`` with a coface ``tau`` one dimension up. The
gradient paths of a critical cell ``p`` alternate faces and matched cofaces,

    p > sigma_0 < tau_1 > sigma_1 < ... > q,

and carry the product of the incidences ``[tau_i : sigma_i]`` together with
``-[tau_{i+1} : sigma_i]`` for every step up a matched pair.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Optional

import networkx as nx
import sympy
from sympy.polys.domains import GF, ZZ
from sympy.polys.matrices import DM
from sympy.polys.matrices.normalforms import invariant_factors

from .constants import Ring
from .error_codes import ErrorCode
from .exceptions import HomologyError, MorseError
from .flow_data import BoundaryProduct, facet_sign, interval_components
from .homology import (
    ChainComplex,
    Generator,
    HomologyGroup,
    HomologyResult,
    chain_complex,
    chain_map,
    check_chain_map,
    homology,
    modulus_of,
)
from .linalg import reduce_matrix
from .models import (
    FacetLabel,
    FlowBimodule,
    FlowCategory,
    FlowObject,
    FormalComponent,
    MorphismCell,
    VirtualDim,
)
from .reports import ValidationReport, Violation
from .utils import parallel_map

logger = logging.getLogger(__name__)

Cell = tuple[str, ...]


def _vertex_key(label: str) -> tuple[int, int, str]:
    return (0, int(label), "") if label.isdigit() else (1, 0, label)


def sort_cell(vertices: Iterable[str]) -> Cell:
    return tuple(sorted(vertices, key=_vertex_key))


def cell_id(cell: Cell) -> str:
    return ",".join(cell)


def _cell_key(cell: Cell) -> tuple:
    return (len(cell), [_vertex_key(v) for v in cell])


def boundary_faces(cell: Cell) -> list[tuple[Cell, int]]:
    """Codimension-1 faces with their incidence signs."""

    if len(cell) < 2:
        return []

    return [(cell[:i] + cell[i + 1 :], -1 if i % 2 else 1) for i in range(len(cell))]


@dataclass(frozen=True)
class SimplicialComplex:
    """A finite simplicial complex closed under taking faces."""

    vertices: tuple[str, ...]
    maximal: tuple[Cell, ...]
    cells: tuple[Cell, ...]

    @cached_property
    def position(self) -> dict[Cell, int]:
        return {cell: i for i, cell in enumerate(self.cells)}

    def __contains__(self, cell: object) -> bool:
        return cell in self.position

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def dimension(self) -> int:
        return max((len(c) - 1 for c in self.cells), default=-1)

    def cells_of_dim(self, k: int) -> list[Cell]:
        return [cell for cell in self.cells if len(cell) == k + 1]

    @property
    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(self.cells_of_dim(k)) for k in range(self.dimension + 1))

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector))

    def incidence(self, tau: Cell, sigma: Cell) -> int:
        for face, sign in boundary_faces(tau):
            if face == sigma:
                return sign
        return 0

    @cached_property
    def boundary_matrix(self) -> sympy.Matrix:
        D = sympy.zeros(len(self.cells), len(self.cells))
        for tau in self.cells:
            for sigma, sign in boundary_faces(tau):
                D[self.position[tau], self.position[sigma]] = sign
        return D

    def chain_complex(self, ring: Ring = Ring.Z) -> ChainComplex:
        return ChainComplex(
            ring=ring,
            basis=tuple(Generator(cell_id(c), len(c) - 1) for c in self.cells),
            differential=reduce_matrix(self.boundary_matrix, modulus_of(ring)),
        )

    def to_list(self) -> list[list[str]]:
        return [list(cell) for cell in self.maximal]


def _parse_simplex(entry: object, position: int) -> Cell:
    if (
        not isinstance(entry, (list, tuple))
        or not entry
        or not all(isinstance(v, (str, int)) and not isinstance(v, bool) for v in entry)
    ):
        raise MorseError(
            f"Simplex {position} must be a non-empty list of vertex labels.",
            ErrorCode.MORSE_INVALID_SIMPLEX,
            witness=(position,),
        )

    labels = [str(v) for v in entry]
    if len(set(labels)) != len(labels):
        raise MorseError(
            f"Simplex {position} lists the same vertex twice.",
            ErrorCode.MORSE_DUPLICATE_VERTEX,
            witness=tuple(labels),
        )

    return sort_cell(labels)


def parse_complex(data: object) -> SimplicialComplex:
    """Close a list of simplices under faces and order the cells canonically."""

    if not isinstance(data, (list, tuple)):
        raise MorseError(code=ErrorCode.MORSE_INVALID_SIMPLEX)

    given = [_parse_simplex(entry, i) for i, entry in enumerate(data)]
    closed: set[Cell] = set()
    for simplex in given:
        for size in range(1, len(simplex) + 1):
            closed.update(combinations(simplex, size))

    maximal = sorted(
        {
            s
            for s in given
            if not any(s != t and set(s) < set(t) for t in given)
        },
        key=_cell_key,
    )
    cells = tuple(sorted(closed, key=_cell_key))
    vertices = tuple(c[0] for c in cells if len(c) == 1)
    logger.debug("Parsed complex with %d cells", len(cells))
    return SimplicialComplex(vertices=vertices, maximal=tuple(maximal), cells=cells)


# Matchings


@dataclass(frozen=True)
class Matching:
    """Pairs ``(sigma, tau)`` with ``sigma`` a codimension-1 face of ``tau``."""

    pairs: tuple[tuple[Cell, Cell], ...] = ()

    @cached_property
    def up(self) -> dict[Cell, Cell]:
        return {sigma: tau for sigma, tau in self.pairs}

    @cached_property
    def down(self) -> dict[Cell, Cell]:
        return {tau: sigma for sigma, tau in self.pairs}

    def is_matched(self, cell: Cell) -> bool:
        return cell in self.up or cell in self.down

    def critical(self, K: SimplicialComplex) -> tuple[Cell, ...]:
        return tuple(cell for cell in K.cells if not self.is_matched(cell))

    def to_list(self) -> list[list[list[str]]]:
        return [[list(sigma), list(tau)] for sigma, tau in self.pairs]


def parse_matching(data: object) -> Matching:
    if not isinstance(data, (list, tuple)):
        raise MorseError(code=ErrorCode.MORSE_UNKNOWN_CELL)

    pairs = []
    for i, entry in enumerate(data):
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise MorseError(
                f"Matched pair {i} must list exactly two cells.",
                ErrorCode.MORSE_NOT_A_FACE,
                witness=(i,),
            )
        pairs.append(tuple(_parse_simplex(cell, i) for cell in entry))

    return Matching(pairs=tuple(pairs))


def check_pairs(K: SimplicialComplex, V: Matching) -> None:
    """Raise unless every pair is a face relation of ``K`` and no cell repeats."""

    seen: set[Cell] = set()
    for sigma, tau in V.pairs:
        for cell in (sigma, tau):
            if cell not in K:
                raise MorseError(
                    f"Matching references {cell_id(cell)!r}, which is not a cell.",
                    ErrorCode.MORSE_UNKNOWN_CELL,
                    witness=(cell_id(cell),),
                )
        if not K.incidence(tau, sigma):
            raise MorseError(
                code=ErrorCode.MORSE_NOT_A_FACE,
                witness=(cell_id(sigma), cell_id(tau)),
            )
        for cell in (sigma, tau):
            if cell in seen:
                raise MorseError(
                    code=ErrorCode.MORSE_DOUBLE_MATCHED, witness=(cell_id(cell),)
                )
            seen.add(cell)


def hasse_digraph(K: SimplicialComplex, V: Matching) -> nx.DiGraph:
    """Face relations point down, except matched pairs, which point up."""

    G = nx.DiGraph()
    G.add_nodes_from(K.cells)
    for tau in K.cells:
        for sigma, _ in boundary_faces(tau):
            if V.up.get(sigma) == tau:
                G.add_edge(sigma, tau)
            else:
                G.add_edge(tau, sigma)
    return G


def find_cycle(K: SimplicialComplex, V: Matching) -> Optional[tuple[Cell, ...]]:
    try:
        edges = nx.find_cycle(hasse_digraph(K, V))
    except nx.NetworkXNoCycle:
        return None

    return tuple(u for u, _ in edges)


def validate_matching(K: SimplicialComplex, V: Matching) -> ValidationReport:
    check_pairs(K, V)
    cycle = find_cycle(K, V)
    if cycle is None:
        return ValidationReport.from_violations([])

    logger.info("Matching has a closed V-path through %d cells", len(cycle))
    return ValidationReport.from_violations(
        [
            Violation.of(
                ErrorCode.MORSE_CYCLIC_MATCHING,
                *map(cell_id, cycle),
                detail="Closed path: " + " -> ".join(map(cell_id, cycle)),
            )
        ]
    )


def greedy_matching(K: SimplicialComplex) -> Matching:
    """Collapse lexicographically, keeping a pair only if no closed path appears."""

    G = hasse_digraph(K, Matching())
    pairs: list[tuple[Cell, Cell]] = []
    matched: set[Cell] = set()
    for tau in K.cells:
        for sigma, _ in sorted(boundary_faces(tau), key=lambda f: _cell_key(f[0])):
            if tau in matched or sigma in matched:
                continue
            G.remove_edge(tau, sigma)
            if nx.has_path(G, tau, sigma):
                G.add_edge(tau, sigma)
                continue
            G.add_edge(sigma, tau)
            pairs.append((sigma, tau))
            matched.update((sigma, tau))

    logger.debug(
        "Greedy matching leaves %d critical cells", len(K.cells) - 2 * len(pairs)
    )
    return Matching(pairs=tuple(pairs))


def _require_acyclic(K: SimplicialComplex, V: Matching) -> None:
    report = validate_matching(K, V)
    if not report.ok:
        raise MorseError(
            report.first.message,
            ErrorCode.MORSE_CYCLIC_MATCHING,
            witness=report.first.location,
        )


# Gradient paths and the flow category


@dataclass(frozen=True)
class GradientPath:
    cells: tuple[Cell, ...]
    sign: int

    @property
    def source(self) -> Cell:
        return self.cells[0]

    @property
    def target(self) -> Cell:
        return self.cells[-1]


def gradient_paths(K: SimplicialComplex, V: Matching, p: Cell) -> list[GradientPath]:
    """All gradient paths from the critical cell ``p`` to critical cells below it."""

    found = []
    stack = [(p, (p,), 1, None)]
    while stack:
        tau, cells, sign, entered = stack.pop()
        for sigma, incidence in boundary_faces(tau):
            if sigma == entered:
                continue
            weight = sign * incidence
            if not V.is_matched(sigma):
                found.append(GradientPath(cells + (sigma,), weight))
            elif sigma in V.up:
                up = V.up[sigma]
                stack.append(
                    (up, cells + (sigma, up), -weight * K.incidence(up, sigma), sigma)
                )

    return sorted(found, key=lambda path: [_cell_key(c) for c in path.cells])


@dataclass(frozen=True)
class MorseFlowOutput:
    complex: SimplicialComplex
    matching: Matching
    critical: tuple[Cell, ...]
    category: FlowCategory
    paths: dict[tuple[Cell, Cell], list[GradientPath]] = field(default_factory=dict)

    @property
    def index(self) -> dict[str, int]:
        return {cell_id(c): len(c) - 1 for c in self.critical}


def _break_products(
    face: tuple[int, ...],
    steps: Iterable[tuple[int, str, MorphismCell, MorphismCell]],
) -> list[BoundaryProduct]:
    products = []
    for vertex, through, first, second in steps:
        label = FacetLabel.breaking(through, vertex)
        sign = facet_sign(face, label)
        for a in first.components:
            for b in second.components:
                if a.vdim == 0 and b.vdim == 0:
                    products.append(BoundaryProduct(label, (a, b), sign))
    return products


def _point_components(
    prefix: str, counts: Sequence[int]
) -> tuple[FormalComponent, ...]:
    return tuple(
        FormalComponent(id=f"{prefix}{i}", total_dim=0, count=count)
        for i, count in enumerate(counts)
    )


def morse_flow_category(
    K: SimplicialComplex, V: Matching, threads: Optional[int] = None
) -> MorseFlowOutput:
    """The flow category of critical cells and gradient paths of ``V``.

    Points are single gradient paths. Every pair of critical cells two indices
    apart gets 1-dimensional components whose ends are the broken paths,
    paired off by sign.
    """

    _require_acyclic(K, V)
    critical = V.critical(K)
    found = parallel_map(lambda p: gradient_paths(K, V, p), critical, threads)

    paths: dict[tuple[Cell, Cell], list[GradientPath]] = defaultdict(list)
    for group in found:
        for path in group:
            paths[(path.source, path.target)].append(path)

    points: dict[tuple[str, str], MorphismCell] = {}
    for (p, q), group in sorted(
        paths.items(), key=lambda item: (_cell_key(item[0][0]), _cell_key(item[0][1]))
    ):
        points[(cell_id(p), cell_id(q))] = MorphismCell(
            source=cell_id(p),
            target=cell_id(q),
            components=_point_components("path", [path.sign for path in group]),
        )

    intervals = []
    for p in critical:
        for r in critical:
            if len(p) - len(r) != 2:
                continue
            P, R = cell_id(p), cell_id(r)
            steps = [
                (0, Q, points[(P, Q)], points[(Q, R)])
                for Q in map(cell_id, critical)
                if (P, Q) in points and (Q, R) in points
            ]
            products = _break_products((0,), steps)
            if products:
                intervals.append(
                    MorphismCell(
                        source=P,
                        target=R,
                        components=interval_components(
                            "interval", products, location=(P, R)
                        ),
                    )
                )

    category = FlowCategory(
        objects=tuple(
            FlowObject(
                id=cell_id(c), vdim=VirtualDim(plus=len(c) - 1), dim=len(c) - 1
            )
            for c in critical
        ),
        morphisms=tuple(points.values()) + tuple(intervals),
    )
    chain_complex(category, Ring.Z)
    logger.info(
        "Morse flow category with %d objects and %d gradient paths",
        len(critical),
        sum(len(group) for group in paths.values()),
    )
    return MorseFlowOutput(
        complex=K,
        matching=V,
        critical=critical,
        category=category,
        paths=dict(paths),
    )


def morse_homology(
    K: SimplicialComplex,
    V: Matching,
    ring: Ring = Ring.Z,
    threads: Optional[int] = None,
) -> HomologyResult:
    """Homology of the Morse flow category in every degree up to ``dim K``."""

    output = morse_flow_category(K, V, threads)
    return homology(chain_complex(output.category, ring), range(K.dimension + 1))


# Algebraic Morse maps


def _series(U: sympy.Matrix) -> sympy.Matrix:
    """``(I - U)^-1`` for a nilpotent ``U``."""

    total = sympy.eye(U.rows)
    power = U
    while any(power):
        total += power
        power = power * U
    return total


@dataclass(frozen=True)
class MorseMaps:
    """V-path expansion, its retraction and the homotopy between them.

    ``inclusion * projection`` is the identity on Morse chains and
    ``D * gradient + gradient * D == projection * inclusion - I``.
    """

    complex: SimplicialComplex
    critical: tuple[Cell, ...]
    inclusion: sympy.Matrix
    projection: sympy.Matrix
    gradient: sympy.Matrix
    differential: sympy.Matrix

    def morse_complex(self, ring: Ring = Ring.Z) -> ChainComplex:
        return ChainComplex(
            ring=ring,
            basis=tuple(Generator(cell_id(c), len(c) - 1) for c in self.critical),
            differential=reduce_matrix(self.differential, modulus_of(ring)),
        )


def morse_maps(K: SimplicialComplex, V: Matching) -> MorseMaps:
    _require_acyclic(K, V)
    D = K.boundary_matrix
    n = len(K.cells)
    reduced = D.copy()
    M = sympy.zeros(n, n)
    for sigma, tau in V.pairs:
        i, j = K.position[sigma], K.position[tau]
        reduced[j, i] = 0
        M[i, j] = -D[j, i]

    critical = V.critical(K)
    rows = [K.position[c] for c in critical]
    select = sympy.zeros(len(rows), n)
    for r, i in enumerate(rows):
        select[r, i] = 1

    inclusion = select * _series(reduced * M)
    projection = _series(M * reduced) * select.T
    return MorseMaps(
        complex=K,
        critical=critical,
        inclusion=inclusion,
        projection=projection,
        gradient=M * _series(reduced * M),
        differential=inclusion * D * select.T,
    )


def inclusion_map(K: SimplicialComplex, V: Matching) -> sympy.Matrix:
    """Morse chains into simplicial chains, checked to be a chain map."""

    maps = morse_maps(K, V)
    check_chain_map(maps.inclusion, maps.morse_complex(), K.chain_complex())
    return maps.inclusion


def projection_map(K: SimplicialComplex, V: Matching) -> sympy.Matrix:
    """Simplicial chains onto Morse chains, checked to be a chain map."""

    maps = morse_maps(K, V)
    check_chain_map(maps.projection, K.chain_complex(), maps.morse_complex())
    return maps.projection


def _check_same_complex(K: SimplicialComplex, other: Optional[SimplicialComplex]):
    if other is not None and other.cells != K.cells:
        raise MorseError(code=ErrorCode.MORSE_COMPLEX_MISMATCH)


def continuation_map(
    K: SimplicialComplex,
    V0: Matching,
    V1: Matching,
    K1: Optional[SimplicialComplex] = None,
) -> sympy.Matrix:
    _check_same_complex(K, K1)
    return morse_maps(K, V0).inclusion * morse_maps(K, V1).projection


def continuation_bimodule(
    K: SimplicialComplex,
    V0: Matching,
    V1: Matching,
    K1: Optional[SimplicialComplex] = None,
    threads: Optional[int] = None,
) -> FlowBimodule:
    """The bimodule from the ``V0`` flow category to the ``V1`` one.

    Its points count the entries of the continuation map, one point per unit;
    the 1-dimensional components between objects one index apart are paired
    from the broken configurations at either end.
    """

    _check_same_complex(K, K1)
    source = morse_flow_category(K, V0, threads)
    target = morse_flow_category(K, V1, threads)
    phi = continuation_map(K, V0, V1)

    middle: dict[tuple[str, str], MorphismCell] = {}
    for i, p in enumerate(source.critical):
        for j, q in enumerate(target.critical):
            value = int(phi[i, j])
            if value:
                sign = 1 if value > 0 else -1
                middle[(cell_id(p), cell_id(q))] = MorphismCell(
                    face=(0, 1),
                    source=cell_id(p),
                    target=cell_id(q),
                    components=_point_components("phi", [sign] * abs(value)),
                )

    left = {(c.source, c.target): c for c in source.category.morphisms}
    right = {(c.source, c.target): c for c in target.category.morphisms}
    left_ids = [cell_id(c) for c in source.critical]
    right_ids = [cell_id(c) for c in target.critical]

    intervals = []
    for p in source.critical:
        for r in target.critical:
            if len(p) - len(r) != 1:
                continue
            P, R = cell_id(p), cell_id(r)
            steps = [
                (0, Q, left[(P, Q)], middle[(Q, R)])
                for Q in left_ids
                if (P, Q) in left and (Q, R) in middle
            ] + [
                (1, Q, middle[(P, Q)], right[(Q, R)])
                for Q in right_ids
                if (P, Q) in middle and (Q, R) in right
            ]
            products = _break_products((0, 1), steps)
            if products:
                intervals.append(
                    MorphismCell(
                        face=(0, 1),
                        source=P,
                        target=R,
                        components=interval_components(
                            "interval", products, location=(P, R)
                        ),
                    )
                )

    bimodule = FlowBimodule(
        vertices=(source.category, target.category),
        cells=tuple(middle.values()) + tuple(intervals),
    )
    chain_map(bimodule, Ring.Z)
    return bimodule


@dataclass(frozen=True)
class ContinuationHomotopy:
    """``D0*homotopy + homotopy*D0 == forward*backward - I``."""

    forward: sympy.Matrix
    backward: sympy.Matrix
    homotopy: sympy.Matrix

    @property
    def round_trip(self) -> sympy.Matrix:
        return self.forward * self.backward


def continuation_homotopy(
    K: SimplicialComplex, V0: Matching, V1: Matching
) -> ContinuationHomotopy:
    """The round trip ``V0 -> V1 -> V0`` and an explicit homotopy to the identity."""

    first = morse_maps(K, V0)
    second = morse_maps(K, V1)
    forward = first.inclusion * second.projection
    backward = second.inclusion * first.projection
    H = first.inclusion * second.gradient * first.projection

    D0 = first.differential
    residual = D0 * H + H * D0 - (forward * backward - sympy.eye(D0.rows))
    if any(residual):
        raise HomologyError(
            code=ErrorCode.HOMOLOGY_CHAIN_MAP_RESIDUAL, residual=residual
        )

    return ContinuationHomotopy(forward=forward, backward=backward, homotopy=H)


# Independent homology oracle


def _rows(matrix: sympy.Matrix) -> list[list[int]]:
    return [[int(matrix[i, j]) for j in range(matrix.cols)] for i in range(matrix.rows)]


def _rank_and_factors(matrix: sympy.Matrix, ring: Ring) -> tuple[int, tuple[int, ...]]:
    if matrix.rows == 0 or matrix.cols == 0:
        return 0, ()

    dense = DM(_rows(matrix), ZZ)
    if ring == Ring.Z2:
        return dense.convert_to(GF(2)).rank(), ()

    factors = tuple(abs(int(f)) for f in invariant_factors(dense) if f)
    return len(factors), factors


def simplicial_homology(K: SimplicialComplex, ring: Ring = Ring.Z) -> HomologyResult:
    """Homology of the full simplicial chain complex via sympy's normal forms."""

    D = K.boundary_matrix
    blocks = {}
    for k in range(K.dimension + 2):
        rows = [K.position[c] for c in K.cells_of_dim(k)]
        cols = [K.position[c] for c in K.cells_of_dim(k - 1)] if k else []
        block = sympy.Matrix(
            len(rows), len(cols), [D[i, j] for i in rows for j in cols]
        )
        blocks[k] = _rank_and_factors(block, ring)

    groups = {}
    for k in range(K.dimension + 1):
        out_rank = blocks[k][0]
        in_rank, factors = blocks[k + 1]
        groups[k] = HomologyGroup(
            ring,
            len(K.cells_of_dim(k)) - out_rank - in_rank,
            tuple(f for f in factors if f > 1),
        )

    return HomologyResult(ring, groups)
