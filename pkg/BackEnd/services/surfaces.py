"""Proper surfaces, variations and minimal-surface classification.

A surface is a set of facet ids. Strength, variation and shortening moves
are computed over interior facets only. Instability is decided by searching
partitions of the bricks; any valid partition must keep each component of
the dual graph cut along the surface on one side, so the search runs over
those components.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import reduce
from itertools import combinations
from operator import xor
from typing import Iterable, Iterator, Optional, Sequence

import networkx as nx

from BackEnd.core.config import get_config
from BackEnd.core.logging_config import get_logger, timed
from BackEnd.models.complex import (
    BrickComplex,
    BrickId,
    FacetId,
    components_without,
    sorted_ids,
)
from BackEnd.models.errors import PartitionError, SearchLimitError
from BackEnd.models.weights import ZERO

logger = get_logger("surfaces")


@dataclass(frozen=True)
class Surface:
    """A set of facets."""

    facets: frozenset = field(default_factory=frozenset)

    @classmethod
    def of(cls, facet_ids: Iterable[FacetId]) -> "Surface":
        return cls(frozenset(facet_ids))

    def __len__(self) -> int:
        return len(self.facets)

    def __iter__(self) -> Iterator[FacetId]:
        return iter(sorted_ids(self.facets))

    def __contains__(self, facet_id: object) -> bool:
        return facet_id in self.facets

    @property
    def is_empty(self) -> bool:
        return not self.facets


EMPTY_SURFACE = Surface()


def _facets_of(S: Surface | Iterable[FacetId]) -> frozenset:
    return S.facets if isinstance(S, Surface) else frozenset(S)


def surface_weight(M: BrickComplex, S: Surface | Iterable[FacetId]) -> Fraction:
    facets = _facets_of(S)
    for facet_id in facets:
        M.require_facet(facet_id, "surface_weight")
    return M.weight_of(facets)


def _ridge_degrees(M: BrickComplex, facets: frozenset) -> dict:
    degrees: dict = {}
    for facet_id in facets:
        for ridge in M.facets[facet_id].ridges:
            degrees[ridge] = degrees.get(ridge, 0) + 1
    return degrees


def is_proper(M: BrickComplex, S: Surface | Iterable[FacetId]) -> bool:
    """No member in the boundary of M; every interior ridge has even degree in S."""
    M.require_brick_complex("is_proper")
    facets = _facets_of(S)
    for facet_id in facets:
        M.require_facet(facet_id, "is_proper")
        if not M.facets[facet_id].interior:
            return False
    boundary_ridges = M.boundary_ridges
    return all(
        degree % 2 == 0
        for ridge, degree in _ridge_degrees(M, facets).items()
        if ridge not in boundary_ridges
    )


def strength(M: BrickComplex, A: BrickId, S: Surface | Iterable[FacetId]) -> Fraction:
    """σ(A;S): weight of A's interior facets off S minus weight of those on S."""
    facets = _facets_of(S)
    interior = M.interior_facets_of(A)
    on = interior & facets
    return M.weight_of(interior - on) - M.weight_of(on)


def vary(M: BrickComplex, S: Surface | Iterable[FacetId], A: BrickId) -> Surface:
    """S_A: swap the interior facets of A that are on S for those that are not."""
    return Surface(_facets_of(S) ^ M.interior_facets_of(A))


@dataclass(frozen=True)
class ShorteningMove:
    brick: BrickId
    strength: Fraction
    strict: bool


def shortening_moves(M: BrickComplex, S: Surface | Iterable[FacetId]) -> list[ShorteningMove]:
    """Bricks touching S with non-positive strength, in brick order."""
    facets = _facets_of(S)
    if not facets:
        return []
    moves: list[ShorteningMove] = []
    for brick in M.brick_ids:
        interior = M.interior_facets_of(brick)
        on = interior & facets
        if not on:
            continue
        value = M.weight_of(interior - on) - M.weight_of(on)
        if value <= 0:
            moves.append(ShorteningMove(brick, value, value < 0))
    return moves


def is_stable_minimal(M: BrickComplex, S: Surface | Iterable[FacetId]) -> bool:
    facets = _facets_of(S)
    if not facets:
        return False
    return not any(move.strict for move in shortening_moves(M, facets))


@dataclass(frozen=True)
class Partition:
    """A two-colouring of the bricks."""

    side_a: frozenset
    side_b: frozenset

    @classmethod
    def from_side_a(cls, M: BrickComplex, side_a: Iterable[BrickId]) -> "Partition":
        side_a = frozenset(side_a)
        return cls(side_a, frozenset(M.bricks) - side_a)

    def side_of(self, brick: BrickId) -> str:
        return "A" if brick in self.side_a else "B"

    def check(self, M: BrickComplex) -> None:
        bricks = frozenset(M.bricks)
        if self.side_a & self.side_b:
            raise PartitionError(
                "partition sides overlap",
                context="check_unstable",
                details={"bricks": sorted_ids(self.side_a & self.side_b)},
            )
        if (self.side_a | self.side_b) != bricks:
            raise PartitionError(
                "partition is not total",
                context="check_unstable",
                details={"missing": sorted_ids(bricks - self.side_a - self.side_b)},
            )
        if not self.side_a or not self.side_b:
            raise PartitionError("partition leaves a side empty", context="check_unstable")


@dataclass(frozen=True)
class UnstableReport:
    """Outcome of checking the four instability conditions for one partition."""

    holds: bool
    violated: Optional[int] = None
    reason: str = ""
    bricks: tuple = ()
    facets: tuple = ()

    def __bool__(self) -> bool:
        return self.holds


def _pair_ok(M: BrickComplex, a: ShorteningMove, b: ShorteningMove) -> bool:
    shared = M.weight_of(M.shared_facets(a.brick, b.brick))
    return 2 * shared >= abs(a.strength) + abs(b.strength)


def check_unstable(
    M: BrickComplex, S: Surface | Iterable[FacetId], P: Partition
) -> UnstableReport:
    """Check the four instability conditions for ``P``; the report names the first failure."""
    P.check(M)
    facets = _facets_of(S)

    for facet_id in sorted_ids(M.interior_facets):
        a, b = M.facets[facet_id].incidence
        if (a in P.side_a) != (b in P.side_a) and facet_id not in facets:
            return UnstableReport(
                False,
                1,
                "bricks on opposite sides share a facet outside the surface",
                bricks=(a, b),
                facets=(facet_id,),
            )

    moves = shortening_moves(M, facets)
    side_a = [m for m in moves if m.brick in P.side_a]
    side_b = [m for m in moves if m.brick in P.side_b]
    if not side_a or not side_b:
        empty = "A" if not side_a else "B"
        return UnstableReport(False, 2, f"side {empty} has no shortening move")
    if not any(m.strict for m in moves):
        return UnstableReport(False, 2, "no strict shortening move on either side")

    for own, other in ((side_a, side_b), (side_b, side_a)):
        for move in own:
            if move.strict and not any(_pair_ok(M, move, partner) for partner in other):
                return UnstableReport(
                    False,
                    3,
                    "strict shortening move has no partner across the partition",
                    bricks=(move.brick,),
                )

    for a in side_a:
        for b in side_b:
            if a.strict and b.strict and not _pair_ok(M, a, b):
                return UnstableReport(
                    False,
                    4,
                    "strict shortening moves on opposite sides overlap too little",
                    bricks=(a.brick, b.brick),
                    facets=tuple(sorted_ids(M.shared_facets(a.brick, b.brick))),
                )

    return UnstableReport(True, reason="all four conditions hold")


@timed("find_unstable_partition")
def find_unstable_partition(
    M: BrickComplex, S: Surface | Iterable[FacetId], cap: Optional[int] = None
) -> Optional[Partition]:
    """Search for a partition witnessing instability.

    Components of the dual graph cut along S are kept whole. Components
    without shortening moves cannot affect conditions (2)-(4), so they ride
    with the first component; only components holding moves are split, with
    the first such component fixed on side A. The first passing split in
    increasing bitmask order is returned.

    Raises:
        SearchLimitError: more move-bearing components than ``cap``.
    """
    facets = _facets_of(S)
    if not facets:
        return None
    cap = get_config().partition_component_cap if cap is None else cap

    moves = shortening_moves(M, facets)
    if not any(m.strict for m in moves):
        return None
    components = components_without(M, facets)
    move_bricks = {m.brick for m in moves}
    active = [c for c in components if c & move_bricks]
    idle = [c for c in components if not c & move_bricks]
    if len(active) < 2:
        return None
    if len(active) > cap:
        raise SearchLimitError(
            f"{len(active)} of {len(components)} cut components carry shortening moves; "
            f"the cap of {cap} counts only those, components without moves stay on side A",
            context="find_unstable_partition",
            details={"components": len(active), "cut_components": len(components), "cap": cap},
        )

    rest = active[1:]
    for mask in range(1, 1 << len(rest)):
        side_b = frozenset().union(*(c for k, c in enumerate(rest) if mask >> k & 1))
        candidate = Partition(frozenset(M.bricks) - side_b, side_b)
        if check_unstable(M, facets, candidate).holds:
            logger.debug("Unstable partition found at mask %d of %d", mask, (1 << len(rest)) - 1)
            return candidate
    return None


def is_embedded(M: BrickComplex, S: Surface | Iterable[FacetId]) -> bool:
    """Interior ridges touched by S meet exactly two members; boundary ridges at most two."""
    facets = _facets_of(S)
    boundary_ridges = M.boundary_ridges
    for ridge, degree in _ridge_degrees(M, facets).items():
        if ridge in boundary_ridges:
            if degree > 2:
                return False
        elif degree != 2:
            return False
    return True


def is_separating(M: BrickComplex, S: Surface | Iterable[FacetId]) -> bool:
    """Cutting the dual graph along S adds at least one component."""
    facets = _facets_of(S)
    if not facets:
        return False
    return len(components_without(M, facets)) > len(components_without(M, ()))


@dataclass(frozen=True)
class ShorteningComplex:
    """Flag complex on the shortening moves; edges join moves sharing no surface facet."""

    vertices: tuple
    edges: tuple
    graph: nx.Graph = field(compare=False, repr=False)

    @property
    def components(self) -> list[frozenset]:
        return [frozenset(c) for c in nx.connected_components(self.graph)]

    def is_simplex(self, bricks: Iterable[BrickId]) -> bool:
        bricks = list(bricks)
        if not all(b in self.graph for b in bricks):
            return False
        return all(self.graph.has_edge(a, b) for a, b in combinations(bricks, 2))


def shortening_complex(M: BrickComplex, S: Surface | Iterable[FacetId]) -> ShorteningComplex:
    facets = _facets_of(S)
    vertices = tuple(m.brick for m in shortening_moves(M, facets))
    graph = nx.Graph()
    graph.add_nodes_from(vertices)
    edges = []
    for a, b in combinations(vertices, 2):
        if not M.shared_facets(a, b) & facets:
            graph.add_edge(a, b)
            edges.append((a, b))
    return ShorteningComplex(vertices, tuple(edges), graph)


class TopologicalIndex(str, Enum):
    INDEX0 = "index0"
    INDEX1 = "index1"
    AT_LEAST_2 = "at-least-2"


def topological_index01(M: BrickComplex, S: Surface | Iterable[FacetId]) -> TopologicalIndex:
    """0 when there are no shortening moves, 1 when their complex is disconnected."""
    complex_ = shortening_complex(M, S)
    if not complex_.vertices:
        return TopologicalIndex.INDEX0
    if not nx.is_connected(complex_.graph):
        return TopologicalIndex.INDEX1
    return TopologicalIndex.AT_LEAST_2


class Verdict(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    NEITHER = "neither"
    EMPTY = "empty"
    IMPROPER = "improper"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class SurfaceClassification:
    surface: Surface
    weight: Fraction
    proper: bool
    embedded: bool
    separating: bool
    moves: tuple
    verdict: Verdict
    partition: Optional[Partition] = None
    report: Optional[UnstableReport] = None
    index: Optional[TopologicalIndex] = None

    @property
    def strict_moves(self) -> tuple:
        return tuple(m.brick for m in self.moves if m.strict)

    @property
    def is_minimal(self) -> bool:
        return self.verdict in (Verdict.STABLE, Verdict.UNSTABLE)

    def to_dict(self) -> dict:
        payload = {
            "verdict": self.verdict.value,
            "weight": str(self.weight),
            "proper": self.proper,
            "embedded": self.embedded,
            "separating": self.separating,
            "moves": [
                {"brick": m.brick, "strength": str(m.strength), "strict": m.strict}
                for m in self.moves
            ],
            "strict_moves": list(self.strict_moves),
            "index": self.index.value if self.index else None,
        }
        if self.partition is not None:
            payload["partition"] = {
                "A": sorted_ids(self.partition.side_a),
                "B": sorted_ids(self.partition.side_b),
            }
        if self.report is not None and not self.report.holds:
            payload["failed_condition"] = self.report.violated
            payload["reason"] = self.report.reason
        return payload


def classify_surface(
    M: BrickComplex,
    S: Surface | Iterable[FacetId],
    hint: Optional[Partition] = None,
    cap: Optional[int] = None,
) -> SurfaceClassification:
    """Stable, unstable, neither, or undetermined when the partition search is capped.

    A ``hint`` partition (for level sets, the sublevel/superlevel split) is
    tried before the full search.
    """
    facets = _facets_of(S)
    surface = Surface(facets)
    weight = surface_weight(M, facets)
    proper = is_proper(M, facets)
    base = dict(surface=surface, weight=weight, proper=proper)
    if not proper:
        return SurfaceClassification(
            **base, embedded=False, separating=False, moves=(), verdict=Verdict.IMPROPER
        )

    embedded = is_embedded(M, facets)
    separating = is_separating(M, facets)
    moves = tuple(shortening_moves(M, facets))
    index = topological_index01(M, facets)
    base.update(embedded=embedded, separating=separating, moves=moves, index=index)
    if not facets:
        return SurfaceClassification(**base, verdict=Verdict.EMPTY)
    if not any(m.strict for m in moves):
        return SurfaceClassification(**base, verdict=Verdict.STABLE)

    report: Optional[UnstableReport] = None
    if hint is not None and hint.side_a and hint.side_b:
        report = check_unstable(M, facets, hint)
        if report.holds:
            return SurfaceClassification(
                **base, verdict=Verdict.UNSTABLE, partition=hint, report=report
            )
    try:
        found = find_unstable_partition(M, facets, cap=cap)
    except SearchLimitError as exc:
        logger.warning("Instability undetermined: %s", exc.message)
        return SurfaceClassification(**base, verdict=Verdict.UNDETERMINED, report=report)
    if found is not None:
        return SurfaceClassification(
            **base, verdict=Verdict.UNSTABLE, partition=found, report=check_unstable(M, facets, found)
        )
    return SurfaceClassification(**base, verdict=Verdict.NEITHER, report=report)


def _cycle_basis(M: BrickComplex, facet_order: Sequence[FacetId]) -> list[int]:
    """GF(2) basis of the proper surfaces, as bitmasks over ``facet_order``."""
    boundary_ridges = M.boundary_ridges
    ridge_index: dict = {}
    columns: list[int] = []
    for facet_id in facet_order:
        column = 0
        for ridge in M.facets[facet_id].ridges:
            if ridge in boundary_ridges:
                continue
            bit = ridge_index.setdefault(ridge, len(ridge_index))
            column |= 1 << bit
        columns.append(column)

    # reduce columns; a combination of facets is a cycle when its column sum vanishes
    pivots: dict[int, tuple[int, int]] = {}
    basis: list[int] = []
    for position, column in enumerate(columns):
        combo = 1 << position
        while column:
            top = column.bit_length() - 1
            if top not in pivots:
                pivots[top] = (column, combo)
                break
            pivot_column, pivot_combo = pivots[top]
            column ^= pivot_column
            combo ^= pivot_combo
        if not column:
            basis.append(combo)
    return basis


@timed("enumerate_proper_cycles")
def enumerate_proper_cycles(
    M: BrickComplex,
    max_weight: Optional[Fraction] = None,
    budget: Optional[int] = None,
) -> list[Surface]:
    """Every non-empty proper surface, optionally bounded in weight.

    Proper surfaces form a GF(2) vector space; its elements are walked in
    Gray-code order from a basis.

    Raises:
        SearchLimitError: the space has more elements than ``budget``.
    """
    M.require_brick_complex("enumerate_proper_cycles")
    budget = get_config().search_budget if budget is None else budget
    facet_order = sorted_ids(M.interior_facets)
    basis = _cycle_basis(M, facet_order)
    if (1 << len(basis)) > budget:
        raise SearchLimitError(
            f"{1 << len(basis)} proper surfaces exceed the budget of {budget}",
            context="enumerate_proper_cycles",
            details={"dimension": len(basis), "budget": budget},
        )
    weights = [M.facets[f].weight for f in facet_order]

    found: list[Surface] = []
    current = 0
    for step in range(1, 1 << len(basis)):
        current ^= basis[(step & -step).bit_length() - 1]
        members = [facet_order[k] for k in range(len(facet_order)) if current >> k & 1]
        if max_weight is not None:
            weight = sum((weights[k] for k in range(len(facet_order)) if current >> k & 1), ZERO)
            if weight > max_weight:
                continue
        found.append(Surface(frozenset(members)))
    found.sort(key=lambda s: (M.weight_of(s.facets), len(s), [repr(f) for f in s]))
    return found


def boundary_of_bricks(M: BrickComplex, bricks: Iterable[BrickId]) -> Surface:
    """Facets with exactly one incident brick inside the set (interior facets only)."""
    inside = frozenset(bricks)
    return Surface(
        frozenset(
            reduce(xor, (M.interior_facets_of(b) for b in inside), frozenset())
        )
    )
