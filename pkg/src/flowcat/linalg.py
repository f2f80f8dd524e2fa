"""Exact Smith normal form with unimodular transforms over Z and Z/2.

Matrices come in and go out as ``sympy.Matrix``; the reduction itself runs on
plain integer lists. For every input ``A`` the result satisfies
``left * A * right == form`` with ``form`` diagonal and, over Z, each nonzero
diagonal entry positive and dividing the next.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import sympy

logger = logging.getLogger(__name__)

IntMatrix = list[list[int]]


@dataclass(frozen=True)
class SmithForm:
    form: sympy.Matrix
    left: sympy.Matrix
    right: sympy.Matrix
    rank: int

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(int(self.form[i, i]) for i in range(self.rank))


def to_rows(matrix: sympy.Matrix | Sequence[Sequence[int]]) -> IntMatrix:
    if isinstance(matrix, sympy.MatrixBase):
        return [
            [int(matrix[i, j]) for j in range(matrix.cols)] for i in range(matrix.rows)
        ]

    return [[int(x) for x in row] for row in matrix]


def to_matrix(rows: IntMatrix, n_cols: int) -> sympy.Matrix:
    flat = [x for row in rows for x in row]
    return sympy.Matrix(len(rows), n_cols, flat)


def _identity(n: int) -> IntMatrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _reduce(value: int, modulus: int | None) -> int:
    return value % modulus if modulus else value


def _pick_pivot(a: IntMatrix, t: int) -> tuple[int, int] | None:
    best: tuple[int, int] | None = None
    best_size = 0
    for i in range(t, len(a)):
        for j in range(t, len(a[i])):
            size = abs(a[i][j])
            if size and (best is None or size < best_size):
                best = (i, j)
                best_size = size

    return best


def smith_normal_form(
    matrix: sympy.Matrix | Sequence[Sequence[int]],
    modulus: int | None = None,
    n_cols: int | None = None,
) -> SmithForm:
    """Diagonalize ``matrix`` by unimodular row and column operations.

    ``modulus`` is None for Z or 2 for Z/2. Pivots are the entries of smallest
    absolute value, ties broken by (row, column).
    """

    a = [[_reduce(x, modulus) for x in row] for row in to_rows(matrix)]
    m = len(a)
    if n_cols is None:
        n_cols = matrix.cols if isinstance(matrix, sympy.MatrixBase) else (
            len(a[0]) if a else 0
        )
    n = n_cols
    left = _identity(m)
    right = _identity(n)

    def swap_rows(i: int, k: int) -> None:
        a[i], a[k] = a[k], a[i]
        left[i], left[k] = left[k], left[i]

    def swap_cols(j: int, k: int) -> None:
        for row in a:
            row[j], row[k] = row[k], row[j]
        for row in right:
            row[j], row[k] = row[k], row[j]

    def add_row(target: int, source: int, factor: int) -> None:
        a[target] = [
            _reduce(x + factor * y, modulus) for x, y in zip(a[target], a[source])
        ]
        left[target] = [
            _reduce(x + factor * y, modulus) for x, y in zip(left[target], left[source])
        ]

    def add_col(target: int, source: int, factor: int) -> None:
        for row in a:
            row[target] = _reduce(row[target] + factor * row[source], modulus)
        for row in right:
            row[target] = _reduce(row[target] + factor * row[source], modulus)

    rank = 0
    for t in range(min(m, n)):
        while True:
            pivot = _pick_pivot(a, t)
            if pivot is None:
                break

            i, j = pivot
            if i != t:
                swap_rows(i, t)
            if j != t:
                swap_cols(j, t)

            p = a[t][t]
            clean = True
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    clean = clean and a[i][t] == 0
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    clean = clean and a[t][j] == 0
            if not clean:
                continue

            offender = next(
                (
                    i
                    for i in range(t + 1, m)
                    for j in range(t + 1, n)
                    if a[i][j] % p
                ),
                None,
            )
            if offender is None:
                break

            add_row(t, offender, 1)

        if pivot is None:
            break

        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            left[t] = [-x for x in left[t]]

        rank += 1

    logger.debug("Smith form of %dx%d matrix has rank %d", m, n, rank)
    return SmithForm(
        form=to_matrix(a, n),
        left=to_matrix(left, m),
        right=to_matrix(right, n),
        rank=rank,
    )


def rank(matrix: sympy.Matrix, modulus: int | None = None) -> int:
    return smith_normal_form(matrix, modulus).rank


def kernel_basis(matrix: sympy.Matrix, modulus: int | None = None) -> sympy.Matrix:
    """Columns spanning the kernel lattice of ``matrix``."""

    snf = smith_normal_form(matrix, modulus)
    return snf.right[:, snf.rank :]


def _residues(
    snf: SmithForm, vector: sympy.Matrix, modulus: int | None
) -> list[int] | None:
    """Coordinates y with form * y == left * vector, or None if there are none."""

    image = to_rows(snf.left * vector)
    coords: list[int] = []
    for i, (value,) in enumerate(image):
        value = _reduce(value, modulus)
        if i < snf.rank:
            pivot = int(snf.form[i, i])
            if value % pivot:
                return None
            coords.append(_reduce(value // pivot, modulus))
        elif value:
            return None

    coords.extend([0] * (snf.form.cols - len(coords)))
    return coords[: snf.form.cols]


def in_column_lattice(
    matrix: sympy.Matrix, vector: sympy.Matrix, modulus: int | None = None
) -> bool:
    """True when ``vector`` is an integer (or Z/2) combination of the columns."""

    if matrix.cols == 0:
        return all(_reduce(int(x), modulus) == 0 for x in vector)

    return _residues(smith_normal_form(matrix, modulus), vector, modulus) is not None


def solve(
    matrix: sympy.Matrix, vector: sympy.Matrix, modulus: int | None = None
) -> sympy.Matrix | None:
    """An exact solution x of ``matrix * x == vector``, or None."""

    snf = smith_normal_form(matrix, modulus)
    if matrix.cols == 0:
        if all(_reduce(int(x), modulus) == 0 for x in vector):
            return sympy.zeros(0, 1)
        return None

    coords = _residues(snf, vector, modulus)
    if coords is None:
        return None

    solution = snf.right * sympy.Matrix(len(coords), 1, coords)
    return solution.applyfunc(lambda x: _reduce(int(x), modulus))


def reduce_matrix(matrix: sympy.Matrix, modulus: int | None) -> sympy.Matrix:
    if not modulus:
        return matrix

    return matrix.applyfunc(lambda x: int(x) % modulus)


def is_zero(matrix: sympy.Matrix, modulus: int | None = None) -> bool:
    return all(_reduce(int(x), modulus) == 0 for x in matrix)
