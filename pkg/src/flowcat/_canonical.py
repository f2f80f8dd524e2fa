"""Pinned reference triangulations for homology cross-checks."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .morse import SimplicialComplex, parse_complex


@dataclass(frozen=True)
class ReferenceComplex:
    """A triangulation tracked by the Morse and oracle tests.

    ``homology`` lists the integral groups by degree in the text form of
    ``HomologyGroup``.
    """

    name: str
    simplices: tuple[tuple[int, ...], ...]
    homology: tuple[str, ...]

    def as_data(self) -> list[list[str]]:
        return [[str(v) for v in simplex] for simplex in self.simplices]

    def build(self) -> SimplicialComplex:
        return parse_complex(self.as_data())


def _klein_grid() -> tuple[tuple[int, ...], ...]:
    """A 3 x 3 grid, periodic across, glued top to bottom with a reflection."""

    def vertex(i: int, j: int) -> int:
        if j == 3:
            i, j = -i, 0
        return 3 * j + i % 3

    triangles = []
    for i in range(3):
        for j in range(3):
            a, b = vertex(i, j), vertex(i + 1, j)
            c, d = vertex(i, j + 1), vertex(i + 1, j + 1)
            triangles += [(a, b, d), (a, c, d)]
    return tuple(triangles)


POINT = ReferenceComplex(name="point", simplices=((0,),), homology=("Z",))

CIRCLE = ReferenceComplex(
    name="circle", simplices=((0, 1), (1, 2), (0, 2)), homology=("Z", "Z")
)

SOLID_SIMPLEX = ReferenceComplex(
    name="simplex", simplices=((0, 1, 2, 3),), homology=("Z", "0", "0", "0")
)

SPHERE = ReferenceComplex(
    name="sphere",
    simplices=tuple(combinations(range(4), 3)),
    homology=("Z", "0", "Z"),
)

# Seven vertices, every pair joined by an edge.
TORUS = ReferenceComplex(
    name="torus",
    simplices=tuple((i, (i + 1) % 7, (i + 3) % 7) for i in range(7))
    + tuple((i, (i + 2) % 7, (i + 3) % 7) for i in range(7)),
    homology=("Z", "Z^2", "Z"),
)

PROJECTIVE_PLANE = ReferenceComplex(
    name="projective-plane",
    simplices=(
        (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
        (1, 2, 4), (2, 3, 5), (1, 3, 4), (2, 4, 5), (1, 3, 5),
    ),
    homology=("Z", "Z/2", "0"),
)

KLEIN_BOTTLE = ReferenceComplex(
    name="klein-bottle", simplices=_klein_grid(), homology=("Z", "Z + Z/2", "0")
)

REFERENCE_COMPLEXES: dict[str, ReferenceComplex] = {
    ref.name: ref
    for ref in (
        POINT,
        CIRCLE,
        SOLID_SIMPLEX,
        SPHERE,
        TORUS,
        PROJECTIVE_PLANE,
        KLEIN_BOTTLE,
    )
}


def reference_complex(name: str) -> SimplicialComplex:
    try:
        return REFERENCE_COMPLEXES[name].build()
    except KeyError:
        raise KeyError(f"no reference triangulation named {name!r}") from None
