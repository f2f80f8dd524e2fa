"""Chain complexes over Z and Z/2 extracted from flow data.

Matrices use the row convention of the flow data: ``D[p][q]`` is the signed
count of 0-dimensional components from ``p`` to ``q``, and a chain map ``F``
from X to Y satisfies ``D_X * F == F * D_Y``.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Optional

import sympy

from .constants import CONE_SOURCE_PREFIX, CONE_TARGET_PREFIX, Ring
from .error_codes import ErrorCode
from .exceptions import HomologyError
from .flow_data import cone
from .linalg import (
    in_column_lattice,
    kernel_basis,
    reduce_matrix,
    smith_normal_form,
    solve,
)
from .models import FlowBimodule, FlowCategory, MorphismCell
from .reports import ExactnessSpot, LESReport
from .utils import parallel_map

logger = logging.getLogger(__name__)


def modulus_of(ring: Ring) -> Optional[int]:
    return 2 if ring == Ring.Z2 else None


@dataclass(frozen=True)
class Generator:
    id: str
    degree: int


@dataclass(frozen=True)
class ChainComplex:
    """A based chain complex; ``differential`` lowers degree by one."""

    ring: Ring
    basis: tuple[Generator, ...]
    differential: sympy.Matrix

    @property
    def modulus(self) -> Optional[int]:
        return modulus_of(self.ring)

    @property
    def ids(self) -> list[str]:
        return [g.id for g in self.basis]

    @property
    def degrees(self) -> list[int]:
        if not self.basis:
            return []
        low = min(g.degree for g in self.basis)
        high = max(g.degree for g in self.basis)
        return list(range(low, high + 1))

    def indices(self, degree: int) -> list[int]:
        return [i for i, g in enumerate(self.basis) if g.degree == degree]

    def block(self, degree: int) -> sympy.Matrix:
        """The differential from degree ``degree`` to ``degree - 1``."""

        return submatrix(
            self.differential, self.indices(degree), self.indices(degree - 1)
        )


@dataclass(frozen=True)
class HomologyGroup:
    ring: Ring
    rank: int = 0
    torsion: tuple[int, ...] = ()

    @property
    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = []
        if self.ring == Ring.Z2:
            if self.rank == 1:
                parts.append("Z/2")
            elif self.rank > 1:
                parts.append(f"(Z/2)^{self.rank}")
        else:
            if self.rank == 1:
                parts.append("Z")
            elif self.rank > 1:
                parts.append(f"Z^{self.rank}")
            parts.extend(f"Z/{t}" for t in self.torsion)

        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class HomologyResult:
    ring: Ring
    groups: dict[int, HomologyGroup] = field(default_factory=dict)

    def __getitem__(self, degree: int) -> HomologyGroup:
        return self.groups.get(degree, HomologyGroup(self.ring))

    @property
    def is_zero(self) -> bool:
        return all(group.is_zero for group in self.groups.values())

    def as_strings(self) -> dict[int, str]:
        return {k: str(group) for k, group in sorted(self.groups.items())}

    def to_dict(self) -> dict:
        return {
            "ring": self.ring.value,
            "groups": {
                str(k): {
                    "rank": group.rank,
                    "torsion": list(group.torsion),
                    "text": str(group),
                }
                for k, group in sorted(self.groups.items())
            },
        }


def submatrix(matrix: sympy.Matrix, rows: Sequence[int], cols: Sequence[int]):
    return sympy.Matrix(
        len(rows), len(cols), [matrix[i, j] for i in rows for j in cols]
    )


def count_matrix(
    cells: Iterable[MorphismCell],
    rows: Sequence[str],
    cols: Sequence[str],
    ring: Ring = Ring.Z,
) -> sympy.Matrix:
    """Signed counts of 0-dimensional components, summed over energies."""

    row_at = {r: i for i, r in enumerate(rows)}
    col_at = {c: j for j, c in enumerate(cols)}
    matrix = sympy.zeros(len(rows), len(cols))
    for cell in cells:
        if cell.source not in row_at or cell.target not in col_at:
            continue
        total = sum(c.count for c in cell.components if c.vdim == 0)
        matrix[row_at[cell.source], col_at[cell.target]] += total

    return reduce_matrix(matrix, modulus_of(ring))


def _first_nonzero(matrix: sympy.Matrix) -> Optional[tuple[int, int]]:
    for i in range(matrix.rows):
        for j in range(matrix.cols):
            if matrix[i, j]:
                return i, j
    return None


def chain_complex(F: FlowCategory, ring: Ring = Ring.Z) -> ChainComplex:
    """Basis the objects in degree dim(p); differential the point counts."""

    ids = list(F.object_ids)
    basis = tuple(Generator(obj.id, obj.dim) for obj in F.objects)
    differential = count_matrix(F.morphisms, ids, ids, ring)

    square = reduce_matrix(differential * differential, modulus_of(ring))
    failing = _first_nonzero(square)
    if failing is not None:
        p, r = ids[failing[0]], ids[failing[1]]
        raise HomologyError(
            f"Differential does not square to zero from {p} to {r}.",
            ErrorCode.HOMOLOGY_DIFFERENTIAL_SQUARE,
            location=(p, r),
            residual=square,
        )

    for i, j in ((i, j) for i in range(len(ids)) for j in range(len(ids))):
        if differential[i, j] and basis[i].degree - basis[j].degree != 1:
            logger.warning(
                "Count from %s to %s does not lower the degree by one", ids[i], ids[j]
            )

    return ChainComplex(ring=ring, basis=basis, differential=differential)


def homology(
    C: ChainComplex, degrees: Optional[Iterable[int]] = None
) -> HomologyResult:
    """Ranks and torsion per degree from Smith normal forms of the blocks.

    ``degrees`` are reported alongside the degrees spanned by the basis.
    """

    def group(degree: int) -> HomologyGroup:
        size = len(C.indices(degree))
        outgoing = smith_normal_form(C.block(degree), C.modulus)
        incoming = smith_normal_form(C.block(degree + 1), C.modulus)
        rank = size - outgoing.rank - incoming.rank
        torsion = () if C.modulus else tuple(
            t for t in incoming.invariant_factors if t > 1
        )
        return HomologyGroup(C.ring, rank, torsion)

    degrees = sorted(set(C.degrees) | set(degrees or ()))
    result = HomologyResult(C.ring, dict(zip(degrees, map(group, degrees))))
    logger.debug("Homology over %s: %s", C.ring.value, result.as_strings())
    return result


def chain_map(B: FlowBimodule, ring: Ring = Ring.Z) -> sympy.Matrix:
    """Counts of 0-dimensional bimodule components, checked to commute with d."""

    left = chain_complex(B.left, ring)
    right = chain_complex(B.right, ring)
    matrix = count_matrix(B.middle(), left.ids, right.ids, ring)
    check_chain_map(matrix, left, right)
    return matrix


def check_chain_map(f: sympy.Matrix, X: ChainComplex, Y: ChainComplex) -> None:
    residual = reduce_matrix(X.differential * f - f * Y.differential, X.modulus)
    failing = _first_nonzero(residual)
    if failing is not None:
        raise HomologyError(
            code=ErrorCode.HOMOLOGY_CHAIN_MAP_RESIDUAL,
            location=(X.ids[failing[0]], Y.ids[failing[1]]),
            residual=residual,
        )


def _same_ring(*complexes: ChainComplex) -> Ring:
    rings = {c.ring for c in complexes}
    if len(rings) != 1:
        raise HomologyError(code=ErrorCode.HOMOLOGY_RING_MISMATCH)
    return rings.pop()


def mapping_cone(f: sympy.Matrix, X: ChainComplex, Y: ChainComplex) -> ChainComplex:
    """The algebraic mapping cone: X shifted up by one, then Y."""

    ring = _same_ring(X, Y)
    basis = tuple(
        Generator(CONE_SOURCE_PREFIX + g.id, g.degree + 1) for g in X.basis
    ) + tuple(Generator(CONE_TARGET_PREFIX + g.id, g.degree) for g in Y.basis)
    top = sympy.Matrix.hstack(-X.differential, f)
    corner = sympy.zeros(len(Y.basis), len(X.basis))
    bottom = sympy.Matrix.hstack(corner, Y.differential)
    differential = reduce_matrix(sympy.Matrix.vstack(top, bottom), modulus_of(ring))
    return ChainComplex(ring=ring, basis=basis, differential=differential)


def cone_isomorphism(C1: ChainComplex, C2: ChainComplex) -> Optional[sympy.Matrix]:
    """A basis permutation ``P`` with ``D1 * P == P * D2``, matching ids and degrees."""

    _same_ring(C1, C2)
    position = {g.id: j for j, g in enumerate(C2.basis)}
    if sorted(position) != sorted(C1.ids) or len(C1.basis) != len(C2.basis):
        return None

    P = sympy.zeros(len(C1.basis), len(C2.basis))
    for i, g in enumerate(C1.basis):
        j = position[g.id]
        if C2.basis[j].degree != g.degree:
            return None
        P[i, j] = 1

    residual = reduce_matrix(C1.differential * P - P * C2.differential, C1.modulus)
    return P if _first_nonzero(residual) is None else None


def chain_homotopy(
    f: sympy.Matrix, g: sympy.Matrix, X: ChainComplex, Y: ChainComplex
) -> sympy.Matrix:
    """An exact H of degree +1 with ``D_X * H + H * D_Y == f - g``."""

    ring = _same_ring(X, Y)
    modulus = modulus_of(ring)
    n, m = len(X.basis), len(Y.basis)
    unknowns = [
        (i, j)
        for i in range(n)
        for j in range(m)
        if Y.basis[j].degree == X.basis[i].degree + 1
    ]
    column = {u: c for c, u in enumerate(unknowns)}

    system = sympy.zeros(n * m, len(unknowns))
    for (k, l), c in column.items():
        for i in range(n):
            if X.differential[i, k]:
                system[i * m + l, c] += X.differential[i, k]
        for j in range(m):
            if Y.differential[l, j]:
                system[k * m + j, c] += Y.differential[l, j]

    target = reduce_matrix(f - g, modulus)
    solution = solve(system, sympy.Matrix(n * m, 1, list(target)), modulus)
    if solution is None:
        raise HomologyError(code=ErrorCode.HOMOLOGY_NO_SOLUTION, residual=target)

    H = sympy.zeros(n, m)
    for (i, j), c in column.items():
        H[i, j] = solution[c]
    return H


def _exactness(
    name: str,
    f: sympy.Matrix,
    g: sympy.Matrix,
    A: ChainComplex,
    B: ChainComplex,
    C: ChainComplex,
) -> ExactnessSpot:
    """Exactness of ``H(A) -f-> H(B) -g-> H(C)`` at H(B).

    Works with column vectors, so every matrix is transposed first.
    """

    modulus = B.modulus
    boundary_a = A.differential.T
    boundary_b = B.differential.T
    boundary_c = C.differential.T
    push, pull = f.T, g.T

    witnesses: list[tuple[int, ...]] = []
    cycles_a = kernel_basis(boundary_a, modulus)
    image_in_kernel = True
    for col in range(cycles_a.cols):
        image = pull * push * cycles_a[:, col]
        if not in_column_lattice(boundary_c, image, modulus):
            image_in_kernel = False
            witnesses.append(tuple(int(x) for x in cycles_a[:, col]))

    cycles_b = kernel_basis(boundary_b, modulus)
    relations = kernel_basis(sympy.Matrix.hstack(pull * cycles_b, boundary_c), modulus)
    image_lattice = sympy.Matrix.hstack(push * cycles_a, boundary_b)
    kernel_in_image = True
    for col in range(relations.cols):
        cycle = cycles_b * relations[: cycles_b.cols, col]
        if not in_column_lattice(image_lattice, cycle, modulus):
            kernel_in_image = False
            witnesses.append(tuple(int(x) for x in reduce_matrix(cycle, modulus)))

    return ExactnessSpot(
        name=name,
        image_in_kernel=image_in_kernel,
        kernel_in_image=kernel_in_image,
        witnesses=tuple(witnesses),
    )


def _zero_complex(ring: Ring) -> ChainComplex:
    return ChainComplex(ring=ring, basis=(), differential=sympy.zeros(0, 0))


@dataclass(frozen=True)
class InducedMap:
    injective: bool
    surjective: bool

    @property
    def isomorphism(self) -> bool:
        return self.injective and self.surjective


def induced_map(f: sympy.Matrix, X: ChainComplex, Y: ChainComplex) -> InducedMap:
    """Whether the chain map ``f`` is injective and surjective on homology."""

    ring = _same_ring(X, Y)
    check_chain_map(f, X, Y)
    zero = _zero_complex(ring)
    injective = _exactness(
        "kernel", sympy.zeros(0, len(X.basis)), f, zero, X, Y
    ).kernel_in_image
    surjective = _exactness(
        "cokernel", f, sympy.zeros(len(Y.basis), 0), X, Y, zero
    ).kernel_in_image
    return InducedMap(injective=injective, surjective=surjective)


def les_check(
    B: FlowBimodule, ring: Ring = Ring.Z, threads: Optional[int] = None
) -> LESReport:
    """Exactness of H(X) -> H(Y) -> H(C(B)) -> H(SX) -> H(SY) at its inner spots."""

    data = cone(B)
    X = chain_complex(B.left, ring)
    Y = chain_complex(B.right, ring)
    C = chain_complex(data.category, ring)
    SX = chain_complex(data.shifted_source, ring)
    SY = chain_complex(data.shifted_target, ring)

    F = chain_map(B, ring)
    include = chain_map(data.include, ring)
    project = chain_map(data.project, ring)
    shifted = chain_map(data.shifted, ring)

    spots = [
        ("H(Y)", F, include, X, Y, C),
        ("H(C)", include, project, Y, C, SX),
        ("H(SX)", project, shifted, C, SX, SY),
    ]
    results = parallel_map(lambda spot: _exactness(*spot), spots, threads)

    report = LESReport(
        ring=ring.value,
        spots=tuple(results),
        homology={
            name: homology(complex_).as_strings()
            for name, complex_ in (("X", X), ("Y", Y), ("C", C))
        },
    )
    for spot in report.spots:
        if not spot.exact:
            logger.warning("Sequence is not exact at %s", spot.name)
    return report
