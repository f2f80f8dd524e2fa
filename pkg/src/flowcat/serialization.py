"""Reading and writing flowcat documents: JSON, DOT and CSV."""

from __future__ import annotations

import csv
import io
import json
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any, Optional, TypeVar, Union

import graphviz
import sympy
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .constants import CORNER_SCHEMA
from .corner_model import Arrow, CornerCategory
from .error_codes import ErrorCode
from .exceptions import InputError
from .flow_data import canonical_form
from .homology import HomologyResult
from .models import FlowBimodule, FlowCategory, FlowSimplex
from .morse import Matching, SimplicialComplex, parse_complex, parse_matching
from .utils import format_rational

logger = logging.getLogger(__name__)

Model = TypeVar("Model", bound=BaseModel)
Source = Union[str, Path, dict, list]


def read_json(path: Union[str, Path]) -> Any:
    path = Path(path)
    if not path.exists():
        raise InputError(
            f"Input file not found: {path}", code=ErrorCode.INPUT_FILE_NOT_FOUND
        )

    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(
            f"{path} is not valid JSON: {exc.msg} (line {exc.lineno})",
            code=ErrorCode.INPUT_INVALID_JSON,
        ) from exc


def _data(source: Source) -> Any:
    return source if isinstance(source, (dict, list)) else read_json(source)


def _validated(model: type[Model], source: Source) -> Model:
    try:
        return model.model_validate(_data(source))
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise InputError(
            f"Input does not match {model.__name__} at {where or 'top level'}: "
            f"{first['msg']}",
            code=ErrorCode.INPUT_SCHEMA_VIOLATION,
        ) from exc


def load_category(source: Source) -> FlowCategory:
    return _validated(FlowCategory, source)


def load_simplex(source: Source) -> FlowSimplex:
    return _validated(FlowSimplex, source)


def load_bimodule(source: Source) -> FlowBimodule:
    return _validated(FlowBimodule, source)


def load_complex(source: Source) -> SimplicialComplex:
    """A list of simplices, or an object with the list under ``simplices``."""

    data = _data(source)
    if isinstance(data, dict):
        if "simplices" not in data:
            raise InputError(
                "Complex documents list their simplices under 'simplices'.",
                code=ErrorCode.INPUT_SCHEMA_VIOLATION,
            )
        data = data["simplices"]

    return parse_complex(data)


def load_matching(source: Source) -> Matching:
    data = _data(source)
    if isinstance(data, dict):
        data = data.get("pairs", [])

    return parse_matching(data)


# Corner categories


class CornerObject(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    codim: int = Field(ge=0)


class CornerArrow(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    source: str
    target: str


class CornerComposite(BaseModel):
    model_config = ConfigDict(frozen=True)

    second: str
    first: str
    result: str


class CornerDocument(BaseModel):
    """Objects with codimensions, and either a partial order or explicit arrows.

    Without ``arrows`` the category is the poset generated by ``leq``. With
    ``arrows`` the identities must be listed and ``composition`` gives
    ``second o first`` for every composable pair of non-identity arrows.
    """

    schema_name: str = Field(default=CORNER_SCHEMA, alias="schema")
    objects: tuple[CornerObject, ...]
    leq: tuple[tuple[str, str], ...] = ()
    arrows: tuple[CornerArrow, ...] = ()
    composition: tuple[CornerComposite, ...] = ()

    model_config = ConfigDict(frozen=True, populate_by_name=True)


def load_corner(source: Source) -> CornerCategory:
    document = _validated(CornerDocument, source)
    codim = {obj.id: obj.codim for obj in document.objects}
    if not document.arrows:
        return CornerCategory.from_poset(codim, document.leq, codim)

    arrows = {a.id: Arrow(a.source, a.target, a.id) for a in document.arrows}
    table = {}
    for entry in document.composition:
        named = (entry.second, entry.first, entry.result)
        missing = [x for x in named if x not in arrows]
        if missing:
            raise InputError(
                f"Composition references unknown arrow {missing[0]!r}",
                code=ErrorCode.INPUT_UNKNOWN_REFERENCE,
            )
        table[(arrows[entry.second], arrows[entry.first])] = arrows[entry.result]

    return CornerCategory(codim, codim, arrows.values(), table or None)


# Writing


def dumps(data: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""

    if isinstance(data, (FlowCategory, FlowSimplex)):
        data = canonical_form(data)
    elif isinstance(data, BaseModel):
        data = data.model_dump(mode="json", by_alias=True)
    elif hasattr(data, "to_dict"):
        data = data.to_dict()

    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_text(text: str, path: Optional[Union[str, Path]] = None) -> None:
    if path is None:
        print(text, end="")
        return

    Path(path).write_text(text, encoding="utf-8")
    logger.info("Wrote %s", path)


def dump(data: Any, path: Optional[Union[str, Path]] = None) -> None:
    write_text(dumps(data), path)


def complex_document(K: SimplicialComplex) -> dict[str, Any]:
    return {"simplices": K.to_list()}


def matching_document(V: Matching) -> dict[str, Any]:
    return {"pairs": V.to_list()}


# DOT
# Node names are positional: edge() reads "a:b" as a node port, and object ids
# may contain colons.


def category_dot(F: FlowCategory, name: str = "flowcat") -> str:
    """Objects ranked by dimension; one edge per cell, labelled by its point count."""

    dot = graphviz.Digraph(name, graph_attr={"rankdir": "TB"})
    objects = sorted(F.objects, key=lambda o: (-o.dim, o.id))
    node = {obj.id: f"n{i}" for i, obj in enumerate(objects)}
    by_dim: dict[int, list[str]] = {}
    for obj in objects:
        by_dim.setdefault(obj.dim, []).append(node[obj.id])
        dot.node(node[obj.id], label=f"{obj.id}\\n[{obj.dim}]")
    for _, names in sorted(by_dim.items()):
        with dot.subgraph() as rank:
            rank.attr(rank="same")
            for each in names:
                rank.node(each)

    for cell in sorted(F.morphisms, key=lambda c: c.key):
        if cell.source not in node or cell.target not in node:
            continue
        count = sum(c.count for c in cell.components if c.vdim == 0)
        label = str(count) if count else f"{len(cell.components)}c"
        if cell.energy:
            label += f" @{format_rational(cell.energy)}"
        dot.edge(node[cell.source], node[cell.target], label=label)

    return dot.source


def simplex_dot(S: FlowSimplex, name: str = "flowsimplex") -> str:
    """One cluster per vertex category; cells between vertices as edges."""

    dot = graphviz.Digraph(name, graph_attr={"rankdir": "LR"})
    node: dict[tuple[int, str], str] = {}
    for i, vertex in enumerate(S.vertices):
        with dot.subgraph(name=f"cluster_{i}") as cluster:
            cluster.attr(label=f"vertex {i}")
            for obj in sorted(vertex.objects, key=lambda o: o.id):
                node[(i, obj.id)] = f"v{i}_{len(node)}"
                cluster.node(node[(i, obj.id)], label=obj.id)

    for cell in sorted(S.all_cells(), key=lambda c: c.key):
        tail = node.get((cell.face[0], cell.source))
        head = node.get((cell.face[-1], cell.target))
        if tail is None or head is None:
            continue
        count = sum(c.count for c in cell.components if c.vdim == 0)
        dot.edge(tail, head, label=f"{','.join(map(str, cell.face))}: {count}")

    return dot.source


def corner_dot(C: CornerCategory, name: str = "corner") -> str:
    """Hasse diagram of the non-identity arrows, objects labelled by codimension."""

    dot = graphviz.Digraph(name, graph_attr={"rankdir": "BT"})
    objects = sorted(C.objects, key=lambda x: (C.codim(x), str(x)))
    node = {p: f"n{i}" for i, p in enumerate(objects)}
    for p in objects:
        dot.node(node[p], label=f"{p}\\ncodim {C.codim(p)}")
    for arrow in sorted(C.arrows, key=repr):
        if C.is_identity(arrow):
            continue
        if C.codim(arrow.target) - C.codim(arrow.source) == 1:
            dot.edge(node[arrow.source], node[arrow.target])

    return dot.source


# CSV


def matrix_csv(matrix: sympy.Matrix, rows: Sequence[str], cols: Sequence[str]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["", *cols])
    for i, row in enumerate(rows):
        writer.writerow([row, *(int(matrix[i, j]) for j in range(len(cols)))])
    return buffer.getvalue()


def homology_csv(result: HomologyResult) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["degree", "rank", "torsion", "group"])
    for degree, group in sorted(result.groups.items()):
        writer.writerow(
            [degree, group.rank, " ".join(map(str, group.torsion)), str(group)]
        )
    return buffer.getvalue()
