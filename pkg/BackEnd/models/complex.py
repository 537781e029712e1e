"""Weighted brick complexes.

A ``BrickComplex`` is an immutable value: bricks (top-dimensional cells) map to
the facets tiling their boundary, and facets carry their ridges, an exact
weight and the bricks they are incident to. Complexes built from simplices
also keep their vertex tuples, which lets constructions such as stabilization
and connected sum work on the vertex level.

Identifiers:
    - simplicial facets and ridges are sorted vertex tuples
    - simplicial bricks are their labels (position in the document by default)
    - generic documents use whatever ids they declare (ints or strings)
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Any, Hashable, Iterable, Mapping, Optional, Sequence

import networkx as nx

from BackEnd.core.logging_config import get_logger
from BackEnd.models.errors import ComplexError, UnknownIdentifierError, UnsupportedKindError
from BackEnd.models.weights import ONE, ZERO, total

logger = get_logger("complex")

BrickId = Hashable
FacetId = Hashable
RidgeId = Hashable


def sort_key(value: Any) -> tuple:
    """Total order over the id types the engine accepts (ints, strings, tuples)."""
    if isinstance(value, bool):
        return (0, int(value))
    if isinstance(value, int):
        return (0, value)
    if isinstance(value, str):
        return (1, value)
    if isinstance(value, tuple):
        return (2, tuple(sort_key(v) for v in value))
    return (3, repr(value))


def sorted_ids(values: Iterable[Any]) -> list:
    return sorted(values, key=sort_key)


class ComplexKind(str, Enum):
    BRICK = "brick-complex"
    NON_PURE = "non-pure"


@dataclass(frozen=True)
class Facet:
    """A codimension-one cell: its ridges, weight and incident bricks."""

    ridges: frozenset
    weight: Fraction
    incidence: tuple

    @property
    def interior(self) -> bool:
        return len(self.incidence) >= 2


@dataclass(frozen=True)
class PseudomanifoldReport:
    pure: bool
    strongly_connected: bool
    closed: bool
    dimension_even: bool

    @property
    def is_closed_pseudomanifold(self) -> bool:
        return self.pure and self.strongly_connected and self.closed

    def to_dict(self) -> dict[str, bool]:
        return {
            "pure": self.pure,
            "strongly_connected": self.strongly_connected,
            "closed": self.closed,
            "dimension_even": self.dimension_even,
        }


@dataclass(frozen=True, eq=False)
class BrickComplex:
    """An n-dimensional weighted brick complex."""

    dimension: int
    bricks: Mapping[BrickId, frozenset]
    facets: Mapping[FacetId, Facet]
    kind: ComplexKind = ComplexKind.BRICK
    vertices: Optional[Mapping[BrickId, tuple]] = None
    interface: frozenset = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ComplexError(
                f"dimension must be at least 1, got {self.dimension}",
                context="complex",
                details={"dimension": self.dimension},
            )
        for brick, facet_ids in self.bricks.items():
            if not facet_ids:
                raise ComplexError(
                    f"brick {brick!r} has no facets", context="complex", details={"brick": brick}
                )
            for facet_id in facet_ids:
                if facet_id not in self.facets:
                    raise UnknownIdentifierError(
                        f"brick {brick!r} lists unknown facet {facet_id!r}",
                        context="complex",
                        details={"brick": brick, "facet": facet_id},
                    )
        for facet_id, facet in self.facets.items():
            if not facet.incidence:
                raise ComplexError(
                    f"facet {facet_id!r} belongs to no brick",
                    context="complex",
                    details={"facet": facet_id},
                )
            if len(set(facet.incidence)) != len(facet.incidence):
                raise ComplexError(
                    f"facet {facet_id!r} glues a brick to itself",
                    context="complex",
                    details={"facet": facet_id, "incidence": list(facet.incidence)},
                )
            if self.kind is ComplexKind.BRICK and len(facet.incidence) > 2:
                raise ComplexError(
                    f"facet incidence exceeds 2 at facet {facet_id!r}",
                    context="complex",
                    details={"facet": facet_id, "incidence": list(facet.incidence)},
                )
            if facet.weight < 0:
                raise ComplexError(
                    f"negative weight on facet {facet_id!r}",
                    context="complex",
                    details={"facet": facet_id},
                )
        for facet_id in self.interface:
            if facet_id not in self.facets:
                raise UnknownIdentifierError(
                    f"interface facet {facet_id!r} is not a facet",
                    context="complex",
                    details={"facet": facet_id},
                )

    # -- construction -----------------------------------------------------

    @classmethod
    def from_parts(
        cls,
        dimension: int,
        bricks: Mapping[BrickId, Iterable[FacetId]],
        facets: Mapping[FacetId, tuple[Iterable[RidgeId], Fraction]],
        kind: ComplexKind = ComplexKind.BRICK,
        vertices: Optional[Mapping[BrickId, tuple]] = None,
        interface: Iterable[FacetId] = (),
    ) -> "BrickComplex":
        """Assemble a complex from brick facet lists and facet (ridges, weight) pairs.

        Incidence is derived from the brick lists; a facet listed twice in one
        brick is a self-gluing and is refused.
        """
        incidence: dict[FacetId, list] = defaultdict(list)
        brick_sets: dict[BrickId, frozenset] = {}
        for brick, facet_ids in bricks.items():
            facet_ids = list(facet_ids)
            if len(set(facet_ids)) != len(facet_ids):
                raise ComplexError(
                    f"brick {brick!r} is glued to itself",
                    context="complex",
                    details={"brick": brick},
                )
            brick_sets[brick] = frozenset(facet_ids)
            for facet_id in facet_ids:
                incidence[facet_id].append(brick)

        facet_map: dict[FacetId, Facet] = {}
        for facet_id, (ridges, weight) in facets.items():
            facet_map[facet_id] = Facet(
                ridges=frozenset(ridges),
                weight=Fraction(weight),
                incidence=tuple(incidence.get(facet_id, ())),
            )
        return cls(
            dimension=dimension,
            bricks=brick_sets,
            facets=facet_map,
            kind=kind,
            vertices=dict(vertices) if vertices is not None else None,
            interface=frozenset(interface),
        )

    def with_interface(self, interface: Iterable[FacetId]) -> "BrickComplex":
        return BrickComplex(
            dimension=self.dimension,
            bricks=self.bricks,
            facets=self.facets,
            kind=self.kind,
            vertices=self.vertices,
            interface=frozenset(interface),
        )

    # -- derived indices --------------------------------------------------

    @cached_property
    def brick_ids(self) -> tuple:
        return tuple(self.bricks)

    @property
    def size(self) -> int:
        return len(self.bricks)

    @property
    def is_simplicial(self) -> bool:
        return self.vertices is not None

    @cached_property
    def interior_facets(self) -> frozenset:
        return frozenset(f for f, facet in self.facets.items() if facet.interior)

    @cached_property
    def boundary_facets(self) -> frozenset:
        return frozenset(f for f, facet in self.facets.items() if not facet.interior)

    @cached_property
    def ridge_facets(self) -> Mapping[RidgeId, frozenset]:
        table: dict[RidgeId, set] = defaultdict(set)
        for facet_id, facet in self.facets.items():
            for ridge in facet.ridges:
                table[ridge].add(facet_id)
        return {ridge: frozenset(members) for ridge, members in table.items()}

    @cached_property
    def boundary_ridges(self) -> frozenset:
        ridges: set = set()
        for facet_id in self.boundary_facets:
            ridges.update(self.facets[facet_id].ridges)
        return frozenset(ridges)

    @cached_property
    def _interior_of(self) -> Mapping[BrickId, frozenset]:
        return {
            brick: frozenset(f for f in facet_ids if self.facets[f].interior)
            for brick, facet_ids in self.bricks.items()
        }

    @cached_property
    def _shared(self) -> Mapping[tuple, frozenset]:
        table: dict[tuple, set] = defaultdict(set)
        for facet_id, facet in self.facets.items():
            for a, b in combinations(facet.incidence, 2):
                table[(a, b)].add(facet_id)
                table[(b, a)].add(facet_id)
        return {pair: frozenset(members) for pair, members in table.items()}

    @cached_property
    def neighbor_weights(self) -> Mapping[BrickId, tuple]:
        """For each brick, (other brick, weight) per interior facet; brick-complexes only."""
        table: dict[BrickId, list] = {brick: [] for brick in self.bricks}
        for facet_id in self.interior_facets:
            facet = self.facets[facet_id]
            if len(facet.incidence) != 2:
                continue
            a, b = facet.incidence
            table[a].append((b, facet.weight))
            table[b].append((a, facet.weight))
        return {brick: tuple(entries) for brick, entries in table.items()}

    def require_brick(self, brick: BrickId, context: str = "complex") -> None:
        if brick not in self.bricks:
            raise UnknownIdentifierError(
                f"unknown brick {brick!r}", context=context, details={"brick": brick}
            )

    def require_facet(self, facet_id: FacetId, context: str = "complex") -> None:
        if facet_id not in self.facets:
            raise UnknownIdentifierError(
                f"unknown facet {facet_id!r}", context=context, details={"facet": facet_id}
            )

    def require_brick_complex(self, context: str) -> None:
        if self.kind is not ComplexKind.BRICK:
            raise UnsupportedKindError(
                f"{context} is not defined for kind {self.kind.value}",
                context=context,
                details={"kind": self.kind.value},
            )

    def interior_facets_of(self, brick: BrickId) -> frozenset:
        """∂_I A: the interior facets on the boundary of a brick."""
        self.require_brick(brick)
        return self._interior_of[brick]

    def shared_facets(self, a: BrickId, b: BrickId) -> frozenset:
        """∂A ⊓ ∂B: facets incident to both bricks."""
        self.require_brick(a)
        self.require_brick(b)
        return self._shared.get((a, b), frozenset())

    def weight_of(self, facet_ids: Iterable[FacetId]) -> Fraction:
        return total(self.facets[f].weight for f in facet_ids)

    @cached_property
    def unit_weights(self) -> bool:
        return all(facet.weight == ONE for facet in self.facets.values())

    @cached_property
    def has_zero_weights(self) -> bool:
        return any(facet.weight == ZERO for facet in self.facets.values())

    def vertex_set(self) -> frozenset:
        if self.vertices is None:
            return frozenset()
        return frozenset(v for simplex in self.vertices.values() for v in simplex)

    def __repr__(self) -> str:
        return (
            f"BrickComplex(dimension={self.dimension}, bricks={len(self.bricks)}, "
            f"facets={len(self.facets)}, kind={self.kind.value})"
        )


def from_simplices(
    simplices: Sequence[Sequence[int]],
    weights: Optional[Mapping[tuple, Fraction]] = None,
    labels: Optional[Sequence[BrickId]] = None,
    kind: ComplexKind = ComplexKind.BRICK,
) -> BrickComplex:
    """Build a complex from top-dimensional simplices given as vertex tuples.

    Facets are all n-subsets and ridges all (n-1)-subsets of each simplex,
    with ids equal to the sorted vertex tuples. Facets missing from
    ``weights`` get weight 1.

    Raises:
        ComplexError: empty input, mixed dimensions, repeated vertices,
            duplicate simplices, bad labels, or incidence above 2 for
            ``kind = brick-complex``.
        UnknownIdentifierError: a weight key that is not a facet.
    """
    if not simplices:
        raise ComplexError("a complex needs at least one simplex", context="from_simplices")
    arity = len(simplices[0])
    if arity < 2:
        raise ComplexError(
            "simplices need at least two vertices", context="from_simplices", details={"arity": arity}
        )
    dimension = arity - 1

    if labels is None:
        labels = list(range(len(simplices)))
    labels = list(labels)
    if len(labels) != len(simplices):
        raise ComplexError(
            f"{len(labels)} labels for {len(simplices)} simplices", context="from_simplices"
        )
    if len(set(labels)) != len(labels):
        raise ComplexError("brick labels must be distinct", context="from_simplices")

    seen: dict[tuple, BrickId] = {}
    brick_vertices: dict[BrickId, tuple] = {}
    for label, simplex in zip(labels, simplices):
        if len(simplex) != arity:
            raise ComplexError(
                f"mixed dimensions: simplex {list(simplex)} has {len(simplex)} vertices, expected {arity}",
                context="from_simplices",
                details={"brick": label},
            )
        canonical = tuple(sorted(simplex, key=sort_key))
        if len(set(canonical)) != arity:
            raise ComplexError(
                f"simplex {list(simplex)} repeats a vertex",
                context="from_simplices",
                details={"brick": label},
            )
        if canonical in seen:
            raise ComplexError(
                f"duplicate simplex {list(canonical)}",
                context="from_simplices",
                details={"brick": label, "duplicate_of": seen[canonical]},
            )
        seen[canonical] = label
        brick_vertices[label] = canonical

    bricks: dict[BrickId, list] = {}
    facet_ridges: dict[tuple, frozenset] = {}
    for label, canonical in brick_vertices.items():
        facet_ids = [tuple(face) for face in combinations(canonical, dimension)]
        bricks[label] = facet_ids
        for facet_id in facet_ids:
            if facet_id not in facet_ridges:
                ridges = (
                    frozenset(tuple(r) for r in combinations(facet_id, dimension - 1))
                    if dimension >= 2
                    else frozenset()
                )
                facet_ridges[facet_id] = ridges

    table = dict(weights or {})
    for key in table:
        if key not in facet_ridges:
            raise UnknownIdentifierError(
                f"weight given for {list(key)}, which is not a facet",
                context="from_simplices",
                details={"facet": key},
            )
    facets = {f: (ridges, table.get(f, ONE)) for f, ridges in facet_ridges.items()}

    complex_ = BrickComplex.from_parts(dimension, bricks, facets, kind=kind, vertices=brick_vertices)
    logger.debug(
        "Built simplicial complex: %d bricks, %d facets", len(complex_.bricks), len(complex_.facets)
    )
    return complex_


def _brick_graph(M: BrickComplex) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(M.bricks)
    for facet in M.facets.values():
        for a, b in combinations(facet.incidence, 2):
            graph.add_edge(a, b)
    return graph


def validate(M: BrickComplex) -> PseudomanifoldReport:
    """Report the pseudomanifold properties of a complex without rejecting it."""
    incidences = [len(facet.incidence) for facet in M.facets.values()]
    graph = _brick_graph(M)
    return PseudomanifoldReport(
        pure=all(k == 2 for k in incidences),
        strongly_connected=graph.number_of_nodes() > 0 and nx.is_connected(graph),
        closed=all(k >= 2 for k in incidences),
        dimension_even=M.dimension % 2 == 0,
    )


def dual_graph(M: BrickComplex) -> nx.MultiGraph:
    """One node per brick, one edge per interior facet keyed by facet id."""
    M.require_brick_complex("dual_graph")
    graph = nx.MultiGraph()
    graph.add_nodes_from(M.bricks)
    for facet_id in sorted_ids(M.interior_facets):
        a, b = M.facets[facet_id].incidence
        graph.add_edge(a, b, key=facet_id, weight=M.facets[facet_id].weight)
    return graph


def components_without(M: BrickComplex, cut: Iterable[FacetId]) -> list[frozenset]:
    """Connected components of the dual graph after deleting the edges in ``cut``."""
    cut = frozenset(cut)
    graph = nx.Graph()
    graph.add_nodes_from(M.bricks)
    for facet_id in M.interior_facets - cut:
        a, b = M.facets[facet_id].incidence
        graph.add_edge(a, b)
    components = [frozenset(c) for c in nx.connected_components(graph)]
    order = {brick: position for position, brick in enumerate(M.brick_ids)}
    components.sort(key=lambda c: min(order[b] for b in c))
    return components
