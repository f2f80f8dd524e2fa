"""Categories with corners and the power-set criterion for corner models.

A category with corners is a finite category with a codimension function on
objects that strictly increases along non-identity arrows. It is a model for
manifolds with corners when the overcategory of every object ``p`` is
isomorphic to the Boolean lattice of subsets of ``{1, ..., codim(p)}``.
"""

from __future__ import annotations

import itertools
import logging
from collections import defaultdict
from collections.abc import Callable, Hashable, Iterable, Iterator, Mapping
from dataclasses import dataclass
from math import comb

from .error_codes import ErrorCode
from .exceptions import CornerModelError
from .reports import ValidationReport, Violation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Arrow:
    source: Hashable
    target: Hashable
    key: Hashable = None


ComposeFn = Callable[[Arrow, Arrow], Arrow]


class NormalSet:
    """The normal directions Q(p) of an object: its atoms in the overcategory."""

    def __init__(self, elements: Iterable[Arrow] = ()):
        self.elements = frozenset(elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Arrow]:
        return iter(sorted(self.elements, key=repr))

    def __contains__(self, item: object) -> bool:
        return item in self.elements

    def __eq__(self, other: object) -> bool:
        if isinstance(other, NormalSet):
            return self.elements == other.elements

        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.elements)

    def __repr__(self) -> str:
        return f"NormalSet({sorted(map(repr, self.elements))})"


@dataclass(frozen=True)
class ArrowDecomposition:
    """Q(q) identified with Q(p) disjoint-union Q_rel(alpha) for alpha: p -> q."""

    arrow: Arrow
    own: NormalSet
    relative: NormalSet
    identification: Mapping[Arrow, Arrow]

    def image(self) -> frozenset[Arrow]:
        return frozenset(self.identification.values())


class CornerCategory:
    """A finite category with a codimension function on objects.

    ``arrows`` must contain one identity (the unique endo-arrow) per object.
    ``compose`` is either a callable ``(g, f) -> g o f`` or a table keyed by
    ``(g, f)``; when omitted the category is treated as a poset and the
    composite is the unique arrow between the endpoints.
    """

    def __init__(
        self,
        objects: Iterable[Hashable],
        codim: Mapping[Hashable, int],
        arrows: Iterable[Arrow],
        compose: ComposeFn | Mapping[tuple[Arrow, Arrow], Arrow] | None = None,
    ):
        self.objects = tuple(objects)
        self._codim = {p: int(codim[p]) for p in self.objects}
        self.arrows = tuple(arrows)
        self._compose = compose
        self._arrow_set = frozenset(self.arrows)
        self._hom: dict[tuple[Hashable, Hashable], list[Arrow]] = defaultdict(list)
        self._into: dict[Hashable, list[Arrow]] = defaultdict(list)

        for arrow in self.arrows:
            for end in (arrow.source, arrow.target):
                if end not in self._codim:
                    raise CornerModelError(
                        f"Arrow {arrow!r} references unknown object {end!r}",
                        code=ErrorCode.CORNER_UNKNOWN_OBJECT,
                    )
            self._hom[(arrow.source, arrow.target)].append(arrow)
            self._into[arrow.target].append(arrow)

    @classmethod
    def from_poset(
        cls,
        elements: Iterable[Hashable],
        leq: Iterable[tuple[Hashable, Hashable]],
        codim: Mapping[Hashable, int],
    ) -> CornerCategory:
        """Poset with an arrow a -> b for every a <= b in the transitive closure."""

        elements = tuple(elements)
        below: dict[Hashable, set[Hashable]] = {p: {p} for p in elements}
        for a, b in leq:
            below[b].add(a)

        changed = True
        while changed:
            changed = False
            for b in elements:
                closure = set().union(*(below[a] for a in below[b]))
                if closure != below[b]:
                    below[b] = closure
                    changed = True

        arrows = [Arrow(a, b) for b in elements for a in elements if a in below[b]]
        return cls(elements, codim, arrows)

    def __contains__(self, item: object) -> bool:
        return item in self._arrow_set or item in self._codim

    def codim(self, p: Hashable) -> int:
        try:
            return self._codim[p]
        except KeyError:
            raise CornerModelError(
                f"Unknown object {p!r}", code=ErrorCode.CORNER_UNKNOWN_OBJECT
            ) from None

    def hom(self, a: Hashable, b: Hashable) -> tuple[Arrow, ...]:
        return tuple(self._hom.get((a, b), ()))

    def arrows_into(self, p: Hashable) -> tuple[Arrow, ...]:
        self.codim(p)
        return tuple(self._into.get(p, ()))

    def identity(self, p: Hashable) -> Arrow:
        endo = self.hom(p, p)
        if len(endo) != 1:
            raise CornerModelError(
                f"Object {p!r} has {len(endo)} endo-arrows",
                code=ErrorCode.CORNER_NOT_FUNCTORIAL,
            )

        return endo[0]

    def is_identity(self, arrow: Arrow) -> bool:
        if arrow.source != arrow.target:
            return False
        return self.hom(arrow.source, arrow.target) == (arrow,)

    def compose(self, g: Arrow, f: Arrow) -> Arrow:
        """Return ``g o f``."""

        if f.target != g.source:
            raise CornerModelError(
                f"Cannot compose {g!r} after {f!r}",
                code=ErrorCode.CORNER_COMPOSITION_UNDEFINED,
            )
        if self.is_identity(f):
            return g
        if self.is_identity(g):
            return f

        if callable(self._compose):
            return self._compose(g, f)

        if self._compose is not None:
            try:
                return self._compose[(g, f)]
            except KeyError:
                raise CornerModelError(
                    f"No composite recorded for {g!r} after {f!r}",
                    code=ErrorCode.CORNER_COMPOSITION_UNDEFINED,
                ) from None

        candidates = self.hom(f.source, g.target)
        if len(candidates) != 1:
            raise CornerModelError(
                f"Composite of {g!r} after {f!r} is not unique",
                code=ErrorCode.CORNER_COMPOSITION_UNDEFINED,
            )

        return candidates[0]


def face_poset(n: int) -> CornerCategory:
    """Faces of the n-simplex; codim(face) = n - dim(face), arrows S -> T for T in S."""

    vertices = range(n + 1)
    faces = [
        tuple(face)
        for size in range(n + 1, 0, -1)
        for face in itertools.combinations(vertices, size)
    ]
    codim = {face: n + 1 - len(face) for face in faces}
    leq = [(s, t) for s in faces for t in faces if set(t) <= set(s)]
    return CornerCategory.from_poset(faces, leq, codim)


def overcategory(C: CornerCategory, p: Hashable) -> CornerCategory:
    """Arrows into ``p``, with factorizations as arrows; codim of the source."""

    objects = C.arrows_into(p)
    codim = {f: C.codim(f.source) for f in objects}
    arrows = [
        Arrow(f, g, h)
        for f in objects
        for g in objects
        for h in C.hom(f.source, g.source)
        if C.compose(g, h) == f
    ]

    def compose(second: Arrow, first: Arrow) -> Arrow:
        return Arrow(first.source, second.target, C.compose(second.key, first.key))

    return CornerCategory(objects, codim, arrows, compose)


def _leq(over: CornerCategory, f: Arrow, g: Arrow) -> bool:
    return bool(over.hom(f, g))


def _atoms(over: CornerCategory) -> list[Arrow]:
    return [f for f in over.objects if over.codim(f) == 1]


def _check_object(C: CornerCategory, p: Hashable) -> Violation | None:
    rank = C.codim(p)
    over = overcategory(C, p)

    for f in over.objects:
        for g in over.objects:
            if len(over.hom(f, g)) > 1:
                return Violation.of(
                    ErrorCode.CORNER_NOT_A_POSET,
                    p,
                    detail=f"{f.source!r} factors through {g.source!r} twice.",
                )

    minimal = [f for f in over.objects if over.codim(f) == 0]
    if len(minimal) != 1 or not all(_leq(over, minimal[0], g) for g in over.objects):
        return Violation.of(
            ErrorCode.CORNER_NOT_BOOLEAN,
            p,
            detail="Overcategory has no unique codimension-0 minimum.",
        )

    counts = defaultdict(int)
    for f in over.objects:
        counts[over.codim(f)] += 1
    expected = {k: comb(rank, k) for k in range(rank + 1)}
    if dict(counts) != expected:
        return Violation.of(
            ErrorCode.CORNER_RANK_MISMATCH,
            p,
            detail=f"Found {dict(sorted(counts.items()))}, expected {expected}.",
        )

    atoms = _atoms(over)
    below = {
        f: frozenset(a for a in atoms if _leq(over, a, f)) for f in over.objects
    }
    for f, atom_set in below.items():
        if len(atom_set) != over.codim(f):
            return Violation.of(
                ErrorCode.CORNER_NOT_BOOLEAN,
                p,
                detail=f"{f.source!r} lies over {len(atom_set)} atoms.",
            )

    if len(set(below.values())) != len(below):
        return Violation.of(
            ErrorCode.CORNER_NOT_BOOLEAN, p, detail="Two strata share their atoms."
        )

    for f in over.objects:
        for g in over.objects:
            if _leq(over, f, g) != (below[f] <= below[g]):
                return Violation.of(
                    ErrorCode.CORNER_NOT_BOOLEAN,
                    p,
                    detail="Order does not match inclusion of atoms.",
                )

    return None


def is_corner_model(C: CornerCategory) -> ValidationReport:
    """Check that every overcategory is a Boolean lattice of rank codim(p)."""

    for arrow in C.arrows:
        if arrow.source == arrow.target:
            if len(C.hom(arrow.source, arrow.target)) != 1:
                return ValidationReport.from_violations(
                    [Violation.of(ErrorCode.CORNER_NOT_FUNCTORIAL, arrow.source)]
                )
        elif C.codim(arrow.target) <= C.codim(arrow.source):
            return ValidationReport.from_violations(
                [
                    Violation.of(
                        ErrorCode.CORNER_NOT_FUNCTORIAL,
                        arrow.source,
                        arrow.target,
                    )
                ]
            )

    for p in C.objects:
        if not C.hom(p, p):
            return ValidationReport.from_violations(
                [
                    Violation.of(
                        ErrorCode.CORNER_NOT_FUNCTORIAL, p, detail="No identity."
                    )
                ]
            )

        violation = _check_object(C, p)
        if violation is not None:
            logger.debug("Object %r fails the corner-model check", p)
            return ValidationReport.from_violations([violation])

    return ValidationReport(ok=True)


def q_set(C: CornerCategory, p: Hashable) -> NormalSet:
    """Minimal non-initial objects of the overcategory of ``p``."""

    atoms = [f for f in C.arrows_into(p) if C.codim(f.source) == 1]
    if len(atoms) != C.codim(p):
        raise CornerModelError(
            f"Object {p!r} has {len(atoms)} normal directions but codim {C.codim(p)}",
            code=ErrorCode.CORNER_NOT_A_MODEL,
        )

    return NormalSet(atoms)


def decompose_arrow(C: CornerCategory, alpha: Arrow) -> ArrowDecomposition:
    """Split Q(q) into the image of Q(p) and the directions normal to p inside q.

    The relative part consists of factorizations ``alpha = gamma o beta`` with
    ``codim(beta.target) = codim(p) + 1``; each is identified with the one atom
    below ``gamma`` that is not below ``alpha``.
    """

    if alpha not in C._arrow_set:
        raise CornerModelError(
            f"Arrow {alpha!r} is not in the category",
            code=ErrorCode.CORNER_UNKNOWN_ARROW,
        )

    p, q = alpha.source, alpha.target
    own = q_set(C, p)
    target_atoms = q_set(C, q)
    identification: dict[Arrow, Arrow] = {s: C.compose(alpha, s) for s in own}

    def atoms_below(f: Arrow) -> set[Arrow]:
        return {
            a
            for a in target_atoms
            for h in C.hom(a.source, f.source)
            if C.compose(f, h) == a
        }

    below_alpha = atoms_below(alpha)
    relative = []
    for gamma in C.arrows_into(q):
        if C.codim(gamma.source) != C.codim(p) + 1:
            continue
        if not any(C.compose(gamma, beta) == alpha for beta in C.hom(p, gamma.source)):
            continue

        extra = atoms_below(gamma) - below_alpha
        if len(extra) != 1:
            raise CornerModelError(
                f"Factorization through {gamma.source!r} adds {len(extra)} directions",
                code=ErrorCode.CORNER_NOT_A_MODEL,
            )
        relative.append(gamma)
        identification[gamma] = extra.pop()

    return ArrowDecomposition(
        arrow=alpha,
        own=own,
        relative=NormalSet(relative),
        identification=identification,
    )


def check_decomposition_coherence(
    C: CornerCategory, alpha: Arrow, beta: Arrow
) -> bool:
    """Q(s) split along alpha then beta agrees with the split along beta o alpha."""

    first = decompose_arrow(C, alpha)
    second = decompose_arrow(C, beta)
    composite = decompose_arrow(C, C.compose(beta, alpha))

    two_step = {
        key: second.identification[value] for key, value in first.identification.items()
    }
    for gamma in second.relative:
        two_step[gamma] = second.identification[gamma]

    target_atoms = frozenset(q_set(C, beta.target))
    if frozenset(two_step.values()) != target_atoms or len(two_step) != len(
        target_atoms
    ):
        return False
    if composite.image() != target_atoms:
        return False

    for s in first.own:
        if two_step[s] != composite.identification[s]:
            return False

    relative_two_step = {two_step[g] for g in first.relative} | {
        two_step[g] for g in second.relative
    }
    relative_one_step = {composite.identification[g] for g in composite.relative}
    return relative_two_step == relative_one_step


def check_model_morphism(
    object_map: Mapping[Hashable, Hashable],
    arrow_map: Mapping[Arrow, Arrow],
    C: CornerCategory,
    D: CornerCategory,
    shift: int = 0,
) -> ValidationReport:
    """Check that (object_map, arrow_map) embeds C in D, codim shifted by ``shift``."""

    violations: list[Violation] = []

    images = [object_map.get(p) for p in C.objects]
    if None in images or len(set(images)) != len(images):
        violations.append(
            Violation.of(
                ErrorCode.CORNER_NOT_A_MODEL_MORPHISM,
                detail="Object map is not an injective total map.",
            )
        )
        return ValidationReport.from_violations(violations)

    for p in C.objects:
        target = object_map[p]
        if target not in D._codim:
            violations.append(
                Violation.of(ErrorCode.CORNER_UNKNOWN_OBJECT, p, target)
            )
        elif D.codim(target) != C.codim(p) + shift:
            violations.append(
                Violation.of(
                    ErrorCode.CORNER_NOT_A_MODEL_MORPHISM,
                    p,
                    detail=f"codim {C.codim(p)} maps to {D.codim(target)}.",
                )
            )
    if violations:
        return ValidationReport.from_violations(violations)

    arrow_images = [arrow_map.get(a) for a in C.arrows]
    if None in arrow_images or len(set(arrow_images)) != len(arrow_images):
        return ValidationReport.from_violations(
            [
                Violation.of(
                    ErrorCode.CORNER_NOT_A_MODEL_MORPHISM,
                    detail="Arrow map is not an injective total map.",
                )
            ]
        )

    for a in C.arrows:
        image = arrow_map[a]
        if image not in D._arrow_set or (image.source, image.target) != (
            object_map[a.source],
            object_map[a.target],
        ):
            violations.append(Violation.of(ErrorCode.CORNER_UNKNOWN_ARROW, a))
        elif C.is_identity(a) and not D.is_identity(image):
            violations.append(
                Violation.of(
                    ErrorCode.CORNER_NOT_A_MODEL_MORPHISM, a, detail="Identity."
                )
            )

    if not violations:
        for f in C.arrows:
            for g in C.arrows:
                if f.target != g.source:
                    continue
                if arrow_map[C.compose(g, f)] != D.compose(arrow_map[g], arrow_map[f]):
                    violations.append(
                        Violation.of(
                            ErrorCode.CORNER_NOT_A_MODEL_MORPHISM,
                            g,
                            f,
                            detail="Composition is not preserved.",
                        )
                    )

    return ValidationReport.from_violations(violations)
