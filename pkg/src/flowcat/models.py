"""Flow categories and flow simplices as formal stratified data.

A derived orbifold is recorded only through its dimension data: underlying
dimension, obstruction rank, a signed point count when the virtual dimension
is zero, and its codimension-1 boundary as a list of labelled facets.

Component ids are unique within a cell. A facet piece names components by id;
which cell each id lives in follows from the facet label:

* break through ``q`` at simplex vertex ``m``: the first id lives in the cell
  ``(face up to m, p, q, lambda_1)`` and the second in
  ``(face from m, q, r, lambda_2)``;
* forget vertex ``k``: the single id lives in ``(face minus k, p, r, lambda)``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .constants import (
    CATEGORY_SCHEMA,
    SIMPLEX_SCHEMA,
    FacetKind,
    GammaKind,
    NormalSign,
)
from .types import FaceIndex, Natural, Rational, Sign


class VirtualDim(BaseModel):
    """A virtual vector space (V+, V-) of virtual dimension plus - minus."""

    model_config = ConfigDict(frozen=True)

    plus: Natural = 0
    minus: Natural = 0

    @property
    def value(self) -> int:
        return self.plus - self.minus


class FacetLabel(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: FacetKind
    through: Optional[str] = None
    through_vertex: int = 0
    energy_split: tuple[Rational, Rational] = (Fraction(0), Fraction(0))
    index: Optional[int] = None
    normal_sign: Optional[NormalSign] = None

    @model_validator(mode="before")
    @classmethod
    def default_normal_sign(cls, data: object) -> object:
        if isinstance(data, dict) and data.get("normal_sign") is None:
            kind = FacetKind(data.get("kind", FacetKind.BREAK))
            sign = NormalSign.MINUS if kind == FacetKind.BREAK else NormalSign.PLUS
            data = {**data, "normal_sign": sign}

        return data

    @model_validator(mode="after")
    def check_kind(self) -> FacetLabel:
        expected = (
            NormalSign.MINUS if self.kind == FacetKind.BREAK else NormalSign.PLUS
        )
        if self.normal_sign != expected:
            raise ValueError(f"{self.kind.value} facets lie in {expected.value}")

        if self.kind == FacetKind.BREAK and self.through is None:
            raise ValueError("break facets need the object they break through")
        if self.kind == FacetKind.FORGET_VERTEX and self.index is None:
            raise ValueError("forget-vertex facets need the vertex index")

        return self

    def key(self) -> tuple:
        if self.kind == FacetKind.BREAK:
            return ("break", self.through_vertex, self.through, self.energy_split)

        return ("forget", self.index)

    @classmethod
    def breaking(
        cls,
        through: str,
        vertex: int = 0,
        split: tuple[Fraction, Fraction] = (Fraction(0), Fraction(0)),
    ) -> FacetLabel:
        return cls(
            kind=FacetKind.BREAK,
            through=through,
            through_vertex=vertex,
            energy_split=split,
        )

    @classmethod
    def forgetting(cls, index: int) -> FacetLabel:
        return cls(kind=FacetKind.FORGET_VERTEX, index=index)


class FacetPiece(BaseModel):
    """One product of components in a facet, with orientation sign and added rank."""

    model_config = ConfigDict(frozen=True)

    components: tuple[str, ...]
    sign: Sign = 1
    added_rank: Natural = 0


class Facet(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: FacetLabel
    pieces: tuple[FacetPiece, ...] = ()


class FormalComponent(BaseModel):
    """Shadow of one derived-orbifold component of a morphism space."""

    model_config = ConfigDict(frozen=True)

    id: str = Field(min_length=1)
    total_dim: Natural
    obstruction_rank: Natural = 0
    count: int = 0
    facets: tuple[Facet, ...] = ()
    facets_available: bool = True
    reconstructed: bool = False
    index_bundle: VirtualDim = VirtualDim()

    @property
    def vdim(self) -> int:
        return self.total_dim - self.obstruction_rank


class MorphismCell(BaseModel):
    """Components of the morphism space over ``face`` from ``source`` to ``target``."""

    model_config = ConfigDict(frozen=True)

    face: FaceIndex = (0,)
    source: str
    target: str
    energy: Rational = Fraction(0)
    components: tuple[FormalComponent, ...] = ()

    @field_validator("face")
    @classmethod
    def validate_face(cls, v: FaceIndex) -> FaceIndex:
        if not v or list(v) != sorted(set(v)) or v[0] < 0:
            raise ValueError("face must be a nonempty increasing tuple of vertices")

        return tuple(v)

    @property
    def key(self) -> tuple[FaceIndex, str, str, Fraction]:
        return (self.face, self.source, self.target, self.energy)

    def component(self, component_id: str) -> Optional[FormalComponent]:
        for component in self.components:
            if component.id == component_id:
                return component

        return None


class FlowObject(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str = Field(min_length=1)
    vdim: VirtualDim = VirtualDim()
    dim: Optional[int] = None

    @model_validator(mode="before")
    @classmethod
    def default_dim(cls, data: object) -> object:
        if isinstance(data, dict) and data.get("dim") is None:
            vdim = data.get("vdim") or {}
            if isinstance(vdim, VirtualDim):
                value = vdim.value
            else:
                value = int(vdim.get("plus", 0)) - int(vdim.get("minus", 0))
            data = {**data, "dim": value}

        return data


class FlowCategory(BaseModel):
    """A flow category: objects with dimension data and graded morphism components."""

    schema_name: Literal["flowcat-category-v1"] = Field(
        default=CATEGORY_SCHEMA, alias="schema"
    )
    gamma: GammaKind = GammaKind.TRIVIAL
    objects: tuple[FlowObject, ...] = ()
    morphisms: tuple[MorphismCell, ...] = ()

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    def object(self, object_id: str) -> Optional[FlowObject]:
        for obj in self.objects:
            if obj.id == object_id:
                return obj

        return None

    def dim(self, object_id: str) -> int:
        obj = self.object(object_id)
        if obj is None:
            raise KeyError(object_id)

        return obj.dim

    @property
    def object_ids(self) -> tuple[str, ...]:
        return tuple(obj.id for obj in self.objects)


class FlowSimplex(BaseModel):
    """A flow n-simplex.

    ``vertices[i]`` is the flow category at vertex i (its morphisms are the
    cells of the face ``(i,)``); ``cells`` hold the faces with two or more
    vertices.
    """

    schema_name: Literal["flowcat-simplex-v1"] = Field(
        default=SIMPLEX_SCHEMA, alias="schema"
    )
    dimension: Natural
    gamma: GammaKind = GammaKind.TRIVIAL
    vertices: tuple[FlowCategory, ...]
    cells: tuple[MorphismCell, ...] = ()

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    @model_validator(mode="after")
    def check_vertices(self) -> FlowSimplex:
        if len(self.vertices) != self.dimension + 1:
            raise ValueError(
                f"a {self.dimension}-simplex needs {self.dimension + 1} vertices"
            )
        for cell in self.cells:
            if len(cell.face) < 2:
                raise ValueError("vertex morphisms belong to the vertex categories")

        return self

    @classmethod
    def point(cls, category: FlowCategory) -> FlowSimplex:
        return cls(dimension=0, gamma=category.gamma, vertices=(category,))

    def cells_of(self, face: FaceIndex) -> tuple[MorphismCell, ...]:
        face = tuple(face)
        if len(face) == 1:
            return self.vertices[face[0]].morphisms

        return tuple(cell for cell in self.cells if cell.face == face)

    def all_cells(self) -> tuple[MorphismCell, ...]:
        vertex_cells = tuple(
            cell.model_copy(update={"face": (i,)})
            for i, vertex in enumerate(self.vertices)
            for cell in vertex.morphisms
        )
        return vertex_cells + self.cells

    def as_category(self) -> FlowCategory:
        if self.dimension != 0:
            raise ValueError("only 0-simplices are flow categories")

        return self.vertices[0]


class FlowBimodule(FlowSimplex):
    """A flow 1-simplex: a bimodule from ``left`` to ``right``."""

    dimension: Natural = 1

    @model_validator(mode="after")
    def check_dimension(self) -> FlowBimodule:
        if self.dimension != 1:
            raise ValueError("a bimodule is a 1-simplex")

        return self

    @classmethod
    def from_simplex(cls, simplex: FlowSimplex) -> FlowBimodule:
        return cls(
            dimension=1,
            gamma=simplex.gamma,
            vertices=simplex.vertices,
            cells=simplex.cells,
        )

    @property
    def left(self) -> FlowCategory:
        return self.vertices[0]

    @property
    def right(self) -> FlowCategory:
        return self.vertices[1]

    def middle(self) -> tuple[MorphismCell, ...]:
        return self.cells_of((0, 1))
