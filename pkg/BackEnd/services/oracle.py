"""Exact invariants: minimal trunk, minimal width, connected-sum bounds.

The trunk is a minimax path problem on the lattice of brick subsets, since Λ
of a sublevel set depends only on which bricks it holds. Width depends on
the whole path, so it is computed by depth-first enumeration, either
exhaustively or with branch-and-bound pruning.

All searches run on integers: facet weights are scaled by the least common
multiple of their denominators and converted back on the way out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

import networkx as nx
import numpy as np

from BackEnd.core.config import get_config
from BackEnd.core.logging_config import get_logger, log_structured, timed
from BackEnd.models.complex import BrickComplex, BrickId, sort_key, validate
from BackEnd.models.errors import (
    ComplexError,
    HypothesisError,
    OrderingError,
    SearchLimitError,
    UnknownIdentifierError,
)
from BackEnd.models.weights import ZERO
from BackEnd.services.constructions import ConnectedSum, build_connected_sum
from BackEnd.services.orderings import (
    ExtremumKind,
    LambdaProfile,
    Ordering,
    Width,
    extrema,
    reverse,
    width_from_profile,
    width_of,
    width_union,
)
from BackEnd.services.surfaces import Surface, boundary_of_bricks
from BackEnd.services.thinning import thin_search

logger = get_logger("oracle")

_INT64_LIMIT = 2**62
_INCUMBENT_BUDGET = 200


def lambda_of_set(M: BrickComplex, bricks: Iterable[BrickId]) -> Fraction:
    """Weight of the interior facets with exactly one incident brick in ``bricks``."""
    M.require_brick_complex("lambda_of_set")
    return M.weight_of(boundary_of_bricks(M, bricks).facets)


@dataclass(frozen=True)
class _Scaled:
    """Integer edge list of the dual graph over bricks numbered 0..N-1."""

    bricks: tuple
    scale: int
    edges: tuple
    neighbours: tuple

    @property
    def size(self) -> int:
        return len(self.bricks)

    @property
    def total(self) -> int:
        return sum(w for _, _, w in self.edges)

    def value(self, scaled: int) -> Fraction:
        return Fraction(int(scaled), self.scale)


def _scaled(M: BrickComplex) -> _Scaled:
    bricks = M.brick_ids
    index = {brick: position for position, brick in enumerate(bricks)}
    interior = [M.facets[f] for f in M.interior_facets]
    scale = math.lcm(*(facet.weight.denominator for facet in interior)) if interior else 1
    edges = []
    neighbours: list[list] = [[] for _ in bricks]
    for facet in interior:
        a, b = (index[x] for x in facet.incidence)
        w = int(facet.weight * scale)
        edges.append((a, b, w))
        neighbours[a].append((b, w))
        neighbours[b].append((a, w))
    return _Scaled(bricks, scale, tuple(edges), tuple(tuple(n) for n in neighbours))


# -- trunk ----------------------------------------------------------------------


def _require_size(M: BrickComplex, cap: int, operation: str) -> None:
    if M.size > cap:
        raise SearchLimitError(
            f"{operation} is limited to {cap} bricks, got {M.size}",
            context=operation,
            details={"bricks": M.size, "cap": cap},
        )


def _trunk_table(M: BrickComplex, cap: Optional[int]) -> tuple[_Scaled, np.ndarray, np.ndarray]:
    M.require_brick_complex("min_trunk")
    cap = get_config().trunk_brick_cap if cap is None else cap
    _require_size(M, cap, "min_trunk")
    data = _scaled(M)
    n = data.size
    dtype = np.int64 if data.total < _INT64_LIMIT else object

    masks = np.arange(1 << n, dtype=np.int64)
    cost = np.zeros(1 << n, dtype=dtype)
    for a, b, w in data.edges:
        cost += w * (((masks >> a) ^ (masks >> b)) & 1).astype(dtype)

    popcount = np.zeros(1 << n, dtype=np.int64)
    for bit in range(n):
        popcount += (masks >> bit) & 1

    sentinel = data.total + 1
    best = np.full(1 << n, sentinel, dtype=dtype)
    choice = np.full(1 << n, -1, dtype=np.int64)
    best[0] = cost[0]
    for layer in range(1, n + 1):
        members = masks[popcount == layer]
        floor = np.full(members.shape, sentinel, dtype=dtype)
        last = np.full(members.shape, -1, dtype=np.int64)
        for bit in range(n):
            has = ((members >> bit) & 1).astype(bool)
            candidate = np.where(has, best[members ^ (1 << bit)], sentinel)
            better = candidate < floor
            floor = np.where(better, candidate, floor)
            last = np.where(better, bit, last)
        best[members] = np.maximum(cost[members], floor)
        choice[members] = last
    return data, best, choice


@timed("min_trunk")
def min_trunk(M: BrickComplex, cap: Optional[int] = None) -> Fraction:
    """tr(M): the least possible maximum of Λ over all orderings.

    Raises:
        SearchLimitError: more bricks than the configured cap.
    """
    data, best, _ = _trunk_table(M, cap)
    value = data.value(best[(1 << data.size) - 1])
    log_structured(
        "INFO", "min_trunk computed", {"bricks": data.size, "trunk": str(value)}, logger_name="oracle"
    )
    return value


def trunk_ordering(M: BrickComplex, cap: Optional[int] = None) -> tuple[Ordering, Fraction]:
    """An ordering whose trunk is tr(M), read back from the DP choices."""
    data, best, choice = _trunk_table(M, cap)
    mask = (1 << data.size) - 1
    value = data.value(best[mask])
    placed_last_first = []
    while mask:
        bit = int(choice[mask])
        placed_last_first.append(data.bricks[bit])
        mask ^= 1 << bit
    return Ordering(tuple(reversed(placed_last_first))), value


# -- width ----------------------------------------------------------------------


class WidthMode(str, Enum):
    EXHAUSTIVE = "exhaustive"
    BNB = "bnb"


@dataclass(frozen=True)
class WidthResult:
    width: Width
    ordering: Ordering
    optimal: bool
    explored: int
    mode: WidthMode

    def to_dict(self) -> dict:
        return {
            "width": self.width.as_strings(),
            "ordering": list(self.ordering.sequence),
            "optimal": self.optimal,
            "explored": self.explored,
            "mode": self.mode.value,
        }


def _scaled_width(values: Sequence[int]) -> tuple:
    return tuple(
        sorted((e.value for e in extrema(values) if e.kind is ExtremumKind.MAXIMUM), reverse=True)
    )


def _first_brick_representatives(
    M: BrickComplex, generators: Sequence[Mapping[BrickId, BrickId]]
) -> list:
    """One brick per orbit of the group generated by weighted dual-graph automorphisms."""
    bricks = set(M.bricks)
    orbits = nx.Graph()
    orbits.add_nodes_from(bricks)
    for number, generator in enumerate(generators):
        if set(generator) != bricks or set(generator.values()) != bricks:
            raise ComplexError(
                "symmetry generator is not a permutation of the bricks",
                context="min_width",
                details={"generator": number},
            )
        for a in bricks:
            for b in bricks:
                if a == b:
                    continue
                if M.weight_of(M.shared_facets(a, b)) != M.weight_of(
                    M.shared_facets(generator[a], generator[b])
                ):
                    raise ComplexError(
                        "symmetry generator does not preserve facet weights between bricks",
                        context="min_width",
                        details={"generator": number, "bricks": [a, b]},
                    )
        orbits.add_edges_from((a, generator[a]) for a in bricks)
    return sorted(
        (min(component, key=sort_key) for component in nx.connected_components(orbits)),
        key=sort_key,
    )


class _WidthSearch:
    """Depth-first search over orderings with an incremental integer profile."""

    def __init__(self, data: _Scaled, prune: bool, node_budget: Optional[int]):
        self.data = data
        self.prune = prune
        self.node_budget = node_budget
        self.best: Optional[tuple] = None
        self.best_sequence: Optional[tuple] = None
        self.explored = 0
        self.stopped = False

    def offer(self, sequence: Sequence[int], values: Sequence[int]) -> None:
        width = _scaled_width(values)
        if self.best is None or width < self.best:
            self.best = width
            self.best_sequence = tuple(sequence)

    def run(self, first_choices: Sequence[int]) -> None:
        for first in first_choices:
            if self.stopped:
                return
            value = sum(w for _, w in self.data.neighbours[first])
            self._descend([first], 1 << first, [0, value], [], 1, value > 0)

    def _descend(
        self,
        sequence: list,
        placed: int,
        values: list,
        confirmed: list,
        run_start: int,
        run_rose: bool,
    ) -> None:
        n = self.data.size
        self.explored += 1
        if self.node_budget is not None and self.explored > self.node_budget:
            self.stopped = True
            return
        if len(sequence) == n:
            self.offer(sequence, values)
            return
        if self.prune and self.best is not None:
            bound = list(confirmed)
            if run_rose and run_start >= 1:
                bound.append(values[-1])
            if tuple(sorted(bound, reverse=True)) >= self.best:
                return
        current = values[-1]
        for brick in range(n):
            if placed >> brick & 1:
                continue
            delta = 0
            for other, w in self.data.neighbours[brick]:
                delta += -w if placed >> other & 1 else w
            new = current + delta
            k = len(sequence)
            if new == current:
                next_confirmed, start, rose = confirmed, run_start, run_rose
            elif new < current:
                next_confirmed = confirmed + [current] if run_rose and run_start >= 1 else confirmed
                start, rose = k + 1, False
            else:
                next_confirmed, start, rose = confirmed, k + 1, True
            sequence.append(brick)
            values.append(new)
            self._descend(sequence, placed | 1 << brick, values, next_confirmed, start, rose)
            sequence.pop()
            values.pop()
            if self.stopped:
                return


def _initial_incumbent(
    M: BrickComplex, data: _Scaled, start: Optional[int], search: _WidthSearch
) -> None:
    order = list(data.bricks)
    if start is not None:
        order.remove(data.bricks[start])
        order.insert(0, data.bricks[start])
    thinned = thin_search(M, Ordering(tuple(order)), budget=_INCUMBENT_BUDGET)
    index = {brick: position for position, brick in enumerate(data.bricks)}
    for candidate in (thinned.ordering.sequence, tuple(order)):
        if start is not None and index[candidate[0]] != start:
            continue
        sequence = [index[b] for b in candidate]
        values = [0]
        placed = 0
        for brick in sequence:
            delta = sum(-w if placed >> o & 1 else w for o, w in data.neighbours[brick])
            values.append(values[-1] + delta)
            placed |= 1 << brick
        search.offer(sequence, values)


@timed("min_width")
def min_width(
    M: BrickComplex,
    mode: WidthMode | str = WidthMode.EXHAUSTIVE,
    start: Optional[BrickId] = None,
    generators: Optional[Sequence[Mapping[BrickId, BrickId]]] = None,
    cap: Optional[int] = None,
    node_budget: Optional[int] = None,
) -> WidthResult:
    """Ω(M), or the least width among orderings that begin with ``start``.

    Exhaustive mode visits every ordering and refuses complexes above the
    cap. Branch-and-bound starts from a thinned incumbent, prunes prefixes
    whose settled maxima already reach it, and reports ``optimal=False`` if
    the node budget runs out first.

    ``generators`` are brick permutations preserving the weighted dual
    graph; only one first brick per orbit is tried. They are ignored when
    ``start`` is given.

    Raises:
        SearchLimitError: exhaustive mode above the cap.
    """
    M.require_brick_complex("min_width")
    mode = WidthMode(mode)
    config = get_config()
    data = _scaled(M)
    index = {brick: position for position, brick in enumerate(data.bricks)}

    if start is not None and start not in index:
        raise UnknownIdentifierError(
            f"unknown brick {start!r}", context="min_width", details={"brick": start}
        )
    if mode is WidthMode.EXHAUSTIVE:
        _require_size(M, config.width_exhaustive_cap if cap is None else cap, "min_width")
        search = _WidthSearch(data, prune=False, node_budget=None)
    else:
        budget = config.bnb_node_budget if node_budget is None else node_budget
        search = _WidthSearch(data, prune=True, node_budget=budget)
        _initial_incumbent(M, data, None if start is None else index[start], search)

    if start is not None:
        first_choices = [index[start]]
    elif generators:
        first_choices = [index[b] for b in _first_brick_representatives(M, generators)]
    else:
        first_choices = list(range(data.size))
    search.run(first_choices)

    width = Width(tuple(data.value(v) for v in search.best))
    ordering = Ordering(tuple(data.bricks[i] for i in search.best_sequence))
    result = WidthResult(width, ordering, not search.stopped, search.explored, mode)
    log_structured(
        "INFO",
        "min_width computed",
        {
            "bricks": data.size,
            "mode": mode.value,
            "width": width.as_strings(),
            "optimal": result.optimal,
            "explored": search.explored,
        },
        logger_name="oracle",
    )
    return result


def _best_width(
    M: BrickComplex, start: Optional[BrickId] = None, node_budget: Optional[int] = None
) -> WidthResult:
    """Exhaustive when small enough, otherwise branch-and-bound."""
    if M.size <= get_config().width_exhaustive_cap:
        return min_width(M, WidthMode.EXHAUSTIVE, start=start)
    return min_width(M, WidthMode.BNB, start=start, node_budget=node_budget)


# -- connected-sum bounds ---------------------------------------------------------


class CheckStatus(str, Enum):
    VERIFIED = "verified"
    VIOLATED = "violated"
    SKIPPED_INFEASIBLE = "skipped-infeasible"


@dataclass(frozen=True)
class BoundCheck:
    status: CheckStatus
    lhs: tuple = ()
    rhs: tuple = ()
    method: str = ""
    exact: bool = True
    witness: Optional[Ordering] = None

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "lhs": [str(v) for v in self.lhs],
            "rhs": [str(v) for v in self.rhs],
            "method": self.method,
            "exact": self.exact,
            "witness": list(self.witness.sequence) if self.witness else None,
        }


@dataclass(frozen=True)
class SumReport:
    sum: ConnectedSum
    ordering: Ordering
    width_lower_ok: BoundCheck
    width_upper_ok: BoundCheck
    trunk_equal_ok: BoundCheck
    factor_widths: tuple = field(default_factory=tuple)

    @property
    def all_verified(self) -> bool:
        return all(
            check.status is CheckStatus.VERIFIED
            for check in (self.width_lower_ok, self.width_upper_ok, self.trunk_equal_ok)
        )

    def to_dict(self) -> dict:
        return {
            "bricks": self.sum.complex.size,
            "ordering": list(self.ordering.sequence),
            "width_lower_ok": self.width_lower_ok.to_dict(),
            "width_upper_ok": self.width_upper_ok.to_dict(),
            "trunk_equal_ok": self.trunk_equal_ok.to_dict(),
            "factor_widths": [w.as_strings() for w in self.factor_widths],
        }


def _require_hypotheses(M: BrickComplex, name: str) -> None:
    report = validate(M)
    problems = []
    if not report.is_closed_pseudomanifold:
        problems.append("not a closed pseudomanifold")
    if not report.dimension_even:
        problems.append(f"dimension {M.dimension} is odd")
    if not M.unit_weights:
        problems.append("weights are not all 1")
    if problems:
        raise HypothesisError(
            f"{name}: " + "; ".join(problems),
            context="verify_sum_bounds",
            details={"operand": name, "problems": problems},
        )


def _trunk_check(M1: BrickComplex, M2: BrickComplex, glued: BrickComplex) -> BoundCheck:
    cap = get_config().trunk_brick_cap
    if max(M1.size, M2.size, glued.size) > cap:
        return BoundCheck(CheckStatus.SKIPPED_INFEASIBLE, method="trunk-dp", exact=False)
    expected = max(min_trunk(M1), min_trunk(M2))
    witness, actual = trunk_ordering(glued)
    status = CheckStatus.VERIFIED if actual == expected else CheckStatus.VIOLATED
    return BoundCheck(
        status,
        (actual,),
        (expected,),
        method="trunk-dp",
        witness=witness if status is CheckStatus.VIOLATED else None,
    )


def _lower_check(
    factor_best: Sequence[WidthResult],
    glued: BrickComplex,
    upper_factors: Width,
    node_budget: Optional[int],
) -> BoundCheck:
    factors_exact = all(r.optimal for r in factor_best)
    biggest = max(r.width for r in factor_best)
    glued_best = _best_width(glued, node_budget=node_budget)
    if factors_exact and glued_best.optimal:
        ok = biggest <= glued_best.width
        return BoundCheck(
            CheckStatus.VERIFIED if ok else CheckStatus.VIOLATED,
            tuple(biggest.terms),
            tuple(glued_best.width.terms),
            method=glued_best.mode.value,
            witness=None if ok else glued_best.ordering,
        )
    # Every ordering of the sum has a first width term at least tr(sum).
    if glued.size <= get_config().trunk_brick_cap:
        floor = Width((min_trunk(glued),))
        if upper_factors <= floor:
            return BoundCheck(
                CheckStatus.VERIFIED,
                tuple(upper_factors.terms),
                tuple(floor.terms),
                method="trunk-bound",
                exact=False,
            )
    return BoundCheck(
        CheckStatus.SKIPPED_INFEASIBLE,
        tuple(biggest.terms),
        tuple(glued_best.width.terms),
        method=glued_best.mode.value,
        exact=False,
    )


@timed("verify_sum_bounds")
def verify_sum_bounds(
    M1: BrickComplex,
    M2: BrickComplex,
    C1: BrickId,
    C2: BrickId,
    vertex_map: Optional[Mapping[int, int]] = None,
    boundary_map: Optional[Mapping] = None,
    node_budget: Optional[int] = None,
) -> SumReport:
    """Check the connected-sum inequalities for width and the trunk identity.

    The upper bound uses the concatenated ordering: a thin ordering of M1
    ending with C1 minus C1, then a thin ordering of M2 starting with C2
    minus C2.

    Raises:
        HypothesisError: an operand is not a closed even-dimensional
            unit-weight pseudomanifold.
    """
    _require_hypotheses(M1, "first operand")
    _require_hypotheses(M2, "second operand")
    built = build_connected_sum(M1, M2, C1, C2, vertex_map=vertex_map, boundary_map=boundary_map)
    glued = built.complex

    ending = _best_width(M1, start=C1, node_budget=node_budget)
    starting = _best_width(M2, start=C2, node_budget=node_budget)
    O1 = reverse(ending.ordering)
    O2 = starting.ordering
    sequence = tuple(built.first[b] for b in O1.sequence[:-1]) + tuple(
        built.second[b] for b in O2.sequence[1:]
    )
    ordering = Ordering(sequence)

    factor_best = [_best_width(M, node_budget=node_budget) for M in (M1, M2)]
    bound = width_union(ending.width, starting.width)
    achieved = width_of(glued, ordering)
    upper_ok = achieved <= bound
    exact = all(r.optimal for r in (ending, starting, *factor_best)) and (
        ending.width == factor_best[0].width and starting.width == factor_best[1].width
    )
    upper = BoundCheck(
        CheckStatus.VERIFIED if upper_ok else CheckStatus.VIOLATED,
        tuple(achieved.terms),
        tuple(bound.terms),
        method="concatenation",
        exact=exact,
        witness=None if upper_ok else ordering,
    )
    lower = _lower_check(factor_best, glued, max(ending.width, starting.width), node_budget)
    trunk = _trunk_check(M1, M2, glued)

    report = SumReport(
        built, ordering, lower, upper, trunk, (factor_best[0].width, factor_best[1].width)
    )
    log_structured(
        "INFO",
        "connected-sum bounds checked",
        {
            "bricks": glued.size,
            "lower": lower.status.value,
            "upper": upper.status.value,
            "trunk": trunk.status.value,
        },
        logger_name="oracle",
    )
    return report


# -- degree-weighted profile --------------------------------------------------------


def _degree_products(M: BrickComplex, placed: frozenset) -> dict:
    products = {}
    for facet_id, facet in M.facets.items():
        inside = sum(1 for brick in facet.incidence if brick in placed)
        products[facet_id] = inside * (len(facet.incidence) - inside)
    return products


def generalized_profile(M: BrickComplex, O: Ordering) -> LambdaProfile:
    """Λ(i) = Σ deg(F; M_i)·deg(F; M_i^C)·ω(F), for any kind of complex."""
    O.check(M)
    inside = {facet_id: 0 for facet_id in M.facets}
    values = [ZERO]
    current = ZERO
    for brick in O.sequence:
        for facet_id in M.bricks[brick]:
            facet = M.facets[facet_id]
            k = inside[facet_id]
            current += (len(facet.incidence) - 2 * k - 1) * facet.weight
            inside[facet_id] = k + 1
        values.append(current)
    return LambdaProfile(tuple(values))


def generalized_level_set(M: BrickComplex, O: Ordering, i: int) -> Surface:
    """Facets with incident bricks on both sides of height i."""
    O.check(M)
    if not 0 <= i <= len(O):
        raise OrderingError(
            f"height {i} outside 0..{len(O)}", context="generalized_level_set", details={"height": i}
        )
    products = _degree_products(M, frozenset(O.sequence[:i]))
    return Surface(frozenset(f for f, p in products.items() if p))


def generalized_width(M: BrickComplex, O: Ordering) -> Width:
    return width_from_profile(generalized_profile(M, O))
