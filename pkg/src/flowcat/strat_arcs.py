"""Stratifying categories of labelled arcs.

An arc from ``p`` to ``r`` is a path of edges labelled by objects of a
sequence of object sets ``(P_0, ..., P_n)``, with set indices nondecreasing
along the path. Every vertex carries a subset of the interior indices strictly
between the set indices of its two edges, and an energy.

Arrows of the category point from coarse arcs to refined arcs: the source of
an arrow into ``gamma`` is obtained from ``gamma`` by collapsing some internal
edges and adding some missing interior indices to vertex labels. With this
direction codim increases along arrows, as in :mod:`flowcat.corner_model`.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from .constants import GammaKind
from .corner_model import Arrow, CornerCategory
from .error_codes import ErrorCode
from .exceptions import ArcError
from .utils import format_rational

logger = logging.getLogger(__name__)

ArcEnd = tuple[int, str]


@dataclass(frozen=True)
class GammaSpec:
    """The energy monoid: trivial, or nonnegative rationals with the identity."""

    kind: GammaKind = GammaKind.TRIVIAL

    def energy(self, value: Fraction) -> Fraction:
        if self.kind == GammaKind.TRIVIAL:
            return Fraction(0)

        return Fraction(value)

    @property
    def is_trivial(self) -> bool:
        return self.kind == GammaKind.TRIVIAL


TRIVIAL_GAMMA = GammaSpec(GammaKind.TRIVIAL)
RATIONAL_GAMMA = GammaSpec(GammaKind.NONNEG_RATIONAL)


@dataclass(frozen=True)
class Vertex:
    indices: frozenset[int] = frozenset()
    energy: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "indices", frozenset(self.indices))
        object.__setattr__(self, "energy", Fraction(self.energy))


@dataclass(frozen=True)
class Arc:
    """A labelled arc; ``edges`` are ``(set_index, element)`` pairs."""

    edges: tuple[ArcEnd, ...]
    vertices: tuple[Vertex, ...]

    def __post_init__(self) -> None:
        edges = tuple((int(m), str(e)) for m, e in self.edges)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "vertices", tuple(self.vertices))

        if len(self.edges) < 2 or len(self.vertices) != len(self.edges) - 1:
            raise ArcError(
                "An arc needs at least two edges and one vertex between each pair",
                code=ErrorCode.ARC_INVALID,
            )

        for left, right in zip(self.edges, self.edges[1:]):
            if right[0] < left[0]:
                raise ArcError(
                    f"Edge set indices decrease from {left} to {right}",
                    code=ErrorCode.ARC_INVALID,
                )

        for position, vertex in enumerate(self.vertices):
            low, high = self.window(position)
            if any(not low < m < high for m in vertex.indices):
                raise ArcError(
                    f"Vertex {position} label {sorted(vertex.indices)} leaves "
                    f"its window ({low}, {high})",
                    code=ErrorCode.ARC_INVALID,
                )
            if low == high and vertex.energy < 0:
                raise ArcError(
                    f"Vertex {position} between edges of one set has negative energy",
                    code=ErrorCode.ARC_INVALID,
                )

    @classmethod
    def build(
        cls,
        edges: Sequence[ArcEnd],
        labels: Sequence[Iterable[int]],
        energies: Sequence[Fraction | int] | None = None,
    ) -> Arc:
        energies = energies if energies is not None else [0] * len(labels)
        return cls(
            tuple(edges),
            tuple(Vertex(frozenset(s), Fraction(e)) for s, e in zip(labels, energies)),
        )

    @classmethod
    def minimal(cls, source: ArcEnd, target: ArcEnd, energy: Fraction | int = 0) -> Arc:
        """The single-vertex arc whose label is every interior index."""

        interior = frozenset(range(source[0] + 1, target[0]))
        return cls((source, target), (Vertex(interior, Fraction(energy)),))

    @property
    def source(self) -> ArcEnd:
        return self.edges[0]

    @property
    def target(self) -> ArcEnd:
        return self.edges[-1]

    @property
    def grade(self) -> Fraction:
        return sum((v.energy for v in self.vertices), Fraction(0))

    @property
    def internal_edges(self) -> tuple[ArcEnd, ...]:
        return self.edges[1:-1]

    def window(self, position: int) -> tuple[int, int]:
        return self.edges[position][0], self.edges[position + 1][0]

    def interior(self) -> range:
        return range(self.source[0] + 1, self.target[0])

    def missing(self) -> frozenset[int]:
        """Interior indices with no edge and in no vertex label."""

        used = {m for m, _ in self.edges}
        for vertex in self.vertices:
            used |= vertex.indices

        return frozenset(m for m in self.interior() if m not in used)

    @property
    def codim(self) -> int:
        return len(self.internal_edges) + len(self.missing())

    def vertex_for(self, index: int) -> int:
        """The vertex whose window strictly contains ``index``."""

        for position in range(len(self.vertices)):
            low, high = self.window(position)
            if low < index < high:
                return position

        raise ArcError(
            f"No vertex window contains index {index}", code=ErrorCode.ARC_INVALID
        )

    def sort_key(self) -> tuple:
        return (
            self.codim,
            self.edges,
            tuple(tuple(sorted(v.indices)) for v in self.vertices),
            tuple(v.energy for v in self.vertices),
        )

    def __str__(self) -> str:
        parts = [f"{self.edges[0][0]}:{self.edges[0][1]}"]
        for vertex, (m, e) in zip(self.vertices, self.edges[1:]):
            label = ",".join(str(i) for i in sorted(vertex.indices))
            energy = f"@{format_rational(vertex.energy)}" if vertex.energy else ""
            parts.append(f"-{{{label}}}{energy}-{m}:{e}")

        return "".join(parts)


@dataclass(frozen=True)
class ArcMorphism:
    """``target`` with ``collapsed`` edges and ``added`` indices labelled."""

    source: Arc
    target: Arc
    collapsed: frozenset[int] = frozenset()
    added: frozenset[int] = frozenset()

    @property
    def is_identity(self) -> bool:
        return not self.collapsed and not self.added

    def as_arrow(self) -> Arrow:
        return Arrow(self.source, self.target, (self.collapsed, self.added))


def compose_arcs(a: Arc, b: Arc) -> Arc:
    """Concatenate ``a`` in P(p, q) with ``b`` in P(q, r) along the new edge ``q``."""

    if a.target != b.source:
        raise ArcError(
            f"Cannot compose: {a.target} is not {b.source}",
            code=ErrorCode.ARC_ENDPOINT_MISMATCH,
        )

    return Arc(a.edges + b.edges[1:], a.vertices + b.vertices)


def collapse(
    arc: Arc,
    collapsed_edges: Iterable[int],
    labels: Mapping[int, Iterable[int]] | None = None,
) -> Arc:
    """Collapse internal edges of ``arc`` and return the resulting coarser arc.

    ``collapsed_edges`` are edge positions ``1 .. len(edges) - 2``. ``labels``
    optionally fixes the full label of result vertices; each must contain the
    union of the labels merged into it and every set index whose edges were
    all collapsed. Energies of merged vertices add.
    """

    collapsed = frozenset(collapsed_edges)
    last = len(arc.edges) - 1
    if any(not 0 < i < last for i in collapsed):
        raise ArcError(
            f"Only internal edges can be collapsed, got {sorted(collapsed)}",
            code=ErrorCode.ARC_INVALID,
        )

    groups: list[list[int]] = [[0]]
    dropped: list[list[int]] = [[]]
    for i in range(1, last):
        if i in collapsed:
            groups[-1].append(i)
            dropped[-1].append(i)
        else:
            groups.append([i])
            dropped.append([])

    edges = tuple(e for i, e in enumerate(arc.edges) if i not in collapsed)
    remaining_sets = {m for m, _ in edges}
    labels = labels or {}

    vertices = []
    for position, (group, lost) in enumerate(zip(groups, dropped)):
        union = frozenset().union(*(arc.vertices[v].indices for v in group))
        forced = frozenset(
            arc.edges[i][0] for i in lost if arc.edges[i][0] not in remaining_sets
        )
        label = frozenset(labels.get(position, union | forced))
        if not union <= label:
            raise ArcError(
                f"Vertex {position} label {sorted(label)} drops merged labels "
                f"{sorted(union - label)}",
                code=ErrorCode.ARC_COLLAPSE_UNION,
            )
        if not forced <= label:
            raise ArcError(
                f"Vertex {position} label {sorted(label)} misses collapsed set "
                f"indices {sorted(forced - label)}",
                code=ErrorCode.ARC_COLLAPSE_FORCED,
            )
        energy = sum((arc.vertices[v].energy for v in group), Fraction(0))
        vertices.append(Vertex(label, energy))

    return Arc(edges, tuple(vertices))


def apply_morphism(target: Arc, collapsed: Iterable[int], added: Iterable[int]) -> Arc:
    """Source of the arrow into ``target`` given by ``(collapsed, added)``."""

    collapsed = frozenset(collapsed)
    added = frozenset(added)
    if not added <= target.missing():
        raise ArcError(
            f"Indices {sorted(added - target.missing())} are not missing in {target}",
            code=ErrorCode.ARC_INVALID,
        )

    coarse = collapse(target, collapsed)
    if not added:
        return coarse

    vertices = list(coarse.vertices)
    for index in added:
        position = coarse.vertex_for(index)
        vertices[position] = replace(
            vertices[position], indices=vertices[position].indices | {index}
        )

    return Arc(coarse.edges, tuple(vertices))


def morphisms_into(target: Arc) -> list[ArcMorphism]:
    """Every arrow into ``target``: the Boolean lattice on edges and missing indices."""

    directions = [("edge", i) for i in range(1, len(target.edges) - 1)] + [
        ("index", m) for m in sorted(target.missing())
    ]
    result = []
    for size in range(len(directions) + 1):
        for chosen in itertools.combinations(directions, size):
            collapsed = frozenset(i for kind, i in chosen if kind == "edge")
            added = frozenset(m for kind, m in chosen if kind == "index")
            source = apply_morphism(target, collapsed, added)
            result.append(ArcMorphism(source, target, collapsed, added))

    return result


def compose_morphisms(g: ArcMorphism, f: ArcMorphism) -> ArcMorphism:
    """``g o f`` for ``f: a -> b`` and ``g: b -> c``."""

    if f.target != g.source:
        raise ArcError(
            "Morphisms are not composable", code=ErrorCode.ARC_ENDPOINT_MISMATCH
        )

    # Edge positions of g.source are the surviving edge positions of g.target.
    surviving = [i for i in range(len(g.target.edges)) if i not in g.collapsed]
    collapsed = g.collapsed | {surviving[i] for i in f.collapsed}
    return ArcMorphism(f.source, g.target, frozenset(collapsed), f.added | g.added)


def _merge_closure(
    decompositions: Iterable[Sequence[Fraction]],
) -> frozenset[tuple[Fraction, ...]]:
    pending = [tuple(Fraction(x) for x in d) for d in decompositions]
    closure: set[tuple[Fraction, ...]] = set()
    while pending:
        current = pending.pop()
        if current in closure or not current:
            continue
        closure.add(current)
        for i in range(len(current) - 1):
            pending.append(
                current[:i] + (current[i] + current[i + 1],) + current[i + 2 :]
            )

    return frozenset(closure)


@dataclass(frozen=True)
class Codim1Stratum:
    """A codimension-1 arc tagged by the normal direction it carries."""

    arc: Arc
    kind: str
    index: Optional[int] = None
    through: Optional[ArcEnd] = None

    @property
    def normal_sign(self) -> str:
        return "Q-" if self.kind == "break" else "Q+"


@dataclass(frozen=True)
class FaceInclusion:
    """Inclusion of the arc category of ``sequence minus set i`` into the full one."""

    index: int

    def _renumber(self, m: int) -> int:
        return m if m < self.index else m + 1

    def map_arc(self, arc: Arc) -> Arc:
        return Arc(
            tuple((self._renumber(m), e) for m, e in arc.edges),
            tuple(
                Vertex(frozenset(self._renumber(m) for m in v.indices), v.energy)
                for v in arc.vertices
            ),
        )

    def map_morphism(self, morphism: ArcMorphism) -> ArcMorphism:
        return ArcMorphism(
            self.map_arc(morphism.source),
            self.map_arc(morphism.target),
            morphism.collapsed,
            frozenset(self._renumber(m) for m in morphism.added),
        )

    def shift_of(self, arc: Arc) -> int:
        return 1 if arc.source[0] < self.index < arc.target[0] else 0


@dataclass(frozen=True)
class ArcCategory:
    """Arcs over ``sequence`` from ``source`` to ``target`` of total energy ``grade``.

    ``source``/``target`` of None range over every element of every set.
    In the nonnegative-rational case enumeration draws vertex energies from
    ``energy_decompositions`` closed under merging consecutive entries.
    """

    sequence: tuple[tuple[str, ...], ...]
    gamma: GammaSpec = TRIVIAL_GAMMA
    source: Optional[ArcEnd] = None
    target: Optional[ArcEnd] = None
    grade: Fraction = Fraction(0)
    energy_decompositions: Optional[frozenset[tuple[Fraction, ...]]] = field(
        default=None
    )

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "sequence", tuple(tuple(str(e) for e in s) for s in self.sequence)
        )
        object.__setattr__(self, "grade", Fraction(self.grade))
        if self.energy_decompositions is not None:
            object.__setattr__(
                self,
                "energy_decompositions",
                _merge_closure(self.energy_decompositions),
            )
        for end in (self.source, self.target):
            if end is not None:
                self._check_end(end)
        if self.gamma.is_trivial and self.grade != 0:
            raise ArcError(
                "Trivial energy monoid only has grade 0",
                code=ErrorCode.ARC_ENERGY_MISMATCH,
            )

    @property
    def n(self) -> int:
        return len(self.sequence) - 1

    def _check_end(self, end: ArcEnd) -> None:
        m, element = end
        if not 0 <= m <= self.n or element not in self.sequence[m]:
            raise ArcError(
                f"{element!r} is not an element of set {m}",
                code=ErrorCode.ARC_ENDPOINT_MISMATCH,
            )

    def with_endpoints(
        self, source: Optional[ArcEnd], target: Optional[ArcEnd], grade=None
    ) -> ArcCategory:
        return replace(
            self,
            source=source,
            target=target,
            grade=self.grade if grade is None else Fraction(grade),
            energy_decompositions=self.energy_decompositions,
        )

    def contains(self, arc: Arc) -> bool:
        """True when ``arc`` is an object of this category."""

        for m, element in arc.edges:
            if not 0 <= m <= self.n or element not in self.sequence[m]:
                return False
        if self.source is not None and arc.source != self.source:
            return False
        if self.target is not None and arc.target != self.target:
            return False
        if self.gamma.is_trivial:
            return all(v.energy == 0 for v in arc.vertices)

        return arc.grade == self.grade

    def _endpoint_pairs(self) -> list[tuple[ArcEnd, ArcEnd]]:
        sources = (
            [self.source]
            if self.source is not None
            else [(m, e) for m, s in enumerate(self.sequence) for e in s]
        )
        targets = (
            [self.target]
            if self.target is not None
            else [(m, e) for m, s in enumerate(self.sequence) for e in s]
        )
        return [(p, r) for p in sources for r in targets if p[0] <= r[0]]

    def _energies(self, length: int, windows: list[tuple[int, int]]):
        if self.gamma.is_trivial:
            yield (Fraction(0),) * length
            return

        for decomposition in sorted(self.energy_decompositions or ()):
            if len(decomposition) != length or sum(decomposition) != self.grade:
                continue
            if any(
                low == high and energy < 0
                for (low, high), energy in zip(windows, decomposition)
            ):
                continue
            yield decomposition

    def enumerate_objects(self, max_codim: Optional[int]) -> list[Arc]:
        """All arcs of codim at most ``max_codim``, canonically sorted."""

        if max_codim is None or (
            not self.gamma.is_trivial and self.energy_decompositions is None
        ):
            raise ArcError(code=ErrorCode.ARC_UNBOUNDED_ENUMERATION)

        found: set[Arc] = set()
        for source, target in self._endpoint_pairs():
            found.update(self._enumerate_between(source, target, max_codim))

        result = sorted(found, key=Arc.sort_key)
        logger.debug("Enumerated %d arcs up to codim %d", len(result), max_codim)
        return result

    def _enumerate_between(self, source: ArcEnd, target: ArcEnd, max_codim: int):
        j, ell = source[0], target[0]
        for count in range(max_codim + 1):
            for set_indices in itertools.combinations_with_replacement(
                range(j, ell + 1), count
            ):
                choices = [self.sequence[m] for m in set_indices]
                for elements in itertools.product(*choices):
                    edges = (source, *zip(set_indices, elements), target)
                    yield from self._label_arcs(edges, max_codim - count)

    def _label_arcs(self, edges: tuple[ArcEnd, ...], budget: int):
        windows = [(edges[i][0], edges[i + 1][0]) for i in range(len(edges) - 1)]
        options = []
        for low, high in windows:
            window = list(range(low + 1, high))
            subsets = [
                frozenset(c)
                for size in range(len(window) + 1)
                for c in itertools.combinations(window, size)
            ]
            options.append([(s, len(window) - len(s)) for s in subsets])

        for labelling in itertools.product(*options):
            if sum(missing for _, missing in labelling) > budget:
                continue
            for energies in self._energies(len(windows), windows):
                yield Arc(
                    tuple(edges),
                    tuple(Vertex(s, e) for (s, _), e in zip(labelling, energies)),
                )

    def enumerate_codim1(
        self,
        source: Optional[ArcEnd] = None,
        target: Optional[ArcEnd] = None,
        grade: Fraction | int | None = None,
    ) -> list[Codim1Stratum]:
        """Codimension-1 arcs tagged as forget-vertex k or break at q."""

        category = self
        if source is not None or target is not None or grade is not None:
            category = self.with_endpoints(
                source if source is not None else self.source,
                target if target is not None else self.target,
                grade,
            )

        strata = []
        for arc in category.enumerate_objects(1):
            if arc.codim != 1:
                continue
            if arc.internal_edges:
                strata.append(
                    Codim1Stratum(arc, "break", through=arc.internal_edges[0])
                )
            else:
                (k,) = arc.missing()
                strata.append(Codim1Stratum(arc, "forget_vertex", index=k))

        return strata

    def face(self, i: int) -> tuple[ArcCategory, FaceInclusion]:
        """The arc category of the sequence without set ``i``, with its inclusion."""

        if not 0 <= i <= self.n or self.n == 0:
            raise ArcError(
                f"Face index {i} out of range for n={self.n}",
                code=ErrorCode.ARC_FACE_OUT_OF_RANGE,
            )

        def restrict(end: Optional[ArcEnd]) -> Optional[ArcEnd]:
            if end is None or end[0] == i:
                return None
            return (end[0] - 1, end[1]) if end[0] > i else end

        sequence = self.sequence[:i] + self.sequence[i + 1 :]
        face = replace(
            self,
            sequence=sequence,
            source=restrict(self.source),
            target=restrict(self.target),
            energy_decompositions=self.energy_decompositions,
        )
        return face, FaceInclusion(i)

    def horn_membership(self, arc: Arc, k: int) -> bool:
        return horn_membership(arc, k, self.n)


def check_face_identities(C: ArcCategory, max_codim: int) -> list[str]:
    """Failures of d^i d^j = d^(j-1) d^i (i < j) on enumerated objects and arrows."""

    failures: list[str] = []
    if C.n < 2:
        return failures

    for j in range(1, C.n + 1):
        for i in range(j):
            face_j, inc_j = C.face(j)
            face_ji, inc_ji = face_j.face(i)
            face_i, inc_i = C.face(i)
            face_ij, inc_ij = face_i.face(j - 1)

            if face_ji != face_ij:
                failures.append(f"d{i}d{j}: categories differ")
                continue
            for arc in face_ji.enumerate_objects(max_codim):
                if inc_j.map_arc(inc_ji.map_arc(arc)) != inc_i.map_arc(
                    inc_ij.map_arc(arc)
                ):
                    failures.append(f"d{i}d{j}: {arc} embeds differently")
                for morphism in morphisms_into(arc):
                    one = inc_j.map_morphism(inc_ji.map_morphism(morphism))
                    two = inc_i.map_morphism(inc_ij.map_morphism(morphism))
                    if one != two:
                        failures.append(
                            f"d{i}d{j}: arrow into {arc} embeds differently"
                        )

    return failures


def horn_membership(arc: Arc, k: int, n: int) -> bool:
    """True iff no vertex spanning (0, n) is labelled {1..n-1} or {1..n-1} minus {k}."""

    if not 0 < k < n:
        raise ArcError(
            f"Horn index {k} must satisfy 0 < k < {n}",
            code=ErrorCode.ARC_FACE_OUT_OF_RANGE,
        )
    if arc.source[0] != 0 or arc.target[0] != n:
        return False

    full = frozenset(range(1, n))
    excluded = {full, full - {k}}
    return not any(
        arc.window(position) == (0, n) and vertex.indices in excluded
        for position, vertex in enumerate(arc.vertices)
    )


def block_functor(arc: Arc, k: int, n: int, strict: bool = True) -> tuple[int, int]:
    """Send an arc to ``(d, epsilon)`` in (augmented simplex category) x 1.

    epsilon is 1 exactly when set k is missing from the arc; d counts the
    other missing interior indices plus the internal edges, so that
    ``codim = d + epsilon``. Arcs outside the horn are rejected unless
    ``strict`` is off.
    """

    if strict and not horn_membership(arc, k, n):
        raise ArcError(
            f"{arc} is not a horn object", code=ErrorCode.ARC_NOT_HORN_OBJECT
        )

    missing = arc.missing()
    epsilon = 1 if k in missing else 0
    d = len(missing - {k}) + len(arc.internal_edges)
    return d, epsilon


def degenerate_sequence(
    sequence: Sequence[Sequence[str]], j: int
) -> tuple[tuple[str, ...], ...]:
    """Repeat set ``j`` of the sequence."""

    sequence = tuple(tuple(s) for s in sequence)
    if not 0 <= j < len(sequence):
        raise ArcError(
            f"Degeneracy index {j} out of range", code=ErrorCode.ARC_FACE_OUT_OF_RANGE
        )

    return sequence[: j + 1] + sequence[j:]


def relabel_degenerate(arc: Arc, j: int) -> Arc:
    """Image of ``arc`` under the relabeling into the sequence with set ``j`` repeated.

    Set indices above ``j`` move up by one and the new index ``j + 1`` joins
    the label of the vertex spanning it, which keeps codim unchanged.
    """

    def shift(m: int) -> int:
        return m if m <= j else m + 1

    moved = Arc(
        tuple((shift(m), e) for m, e in arc.edges),
        tuple(
            Vertex(frozenset(shift(m) for m in v.indices), v.energy)
            for v in arc.vertices
        ),
    )
    if not moved.source[0] <= j < moved.target[0]:
        return moved

    position = moved.vertex_for(j + 1)
    vertices = list(moved.vertices)
    vertices[position] = replace(
        vertices[position], indices=vertices[position].indices | {j + 1}
    )
    return Arc(moved.edges, tuple(vertices))


def arc_corner_category(C: ArcCategory, max_codim: int) -> CornerCategory:
    """The bounded arc category as a :class:`CornerCategory`."""

    arcs = C.enumerate_objects(max_codim)
    return corner_category_on(arcs)


def corner_category_on(arcs: Sequence[Arc]) -> CornerCategory:
    members = set(arcs)
    arrows = [
        m.as_arrow()
        for target in arcs
        for m in morphisms_into(target)
        if m.source in members
    ]

    def compose(g: Arrow, f: Arrow) -> Arrow:
        return compose_morphisms(_as_morphism(g), _as_morphism(f)).as_arrow()

    return CornerCategory(arcs, {a: a.codim for a in arcs}, arrows, compose)


def _as_morphism(arrow: Arrow) -> ArcMorphism:
    collapsed, added = arrow.key
    return ArcMorphism(arrow.source, arrow.target, collapsed, added)


def horn_category(C: ArcCategory, k: int, max_codim: int) -> CornerCategory:
    """Full subcategory on the horn objects of ``C``."""

    arcs = [a for a in C.enumerate_objects(max_codim) if horn_membership(a, k, C.n)]
    return corner_category_on(arcs)
