"""Width-non-increasing moves and the search for locally thin orderings.

A swap at height i exchanges the bricks at heights i and i+1 and changes the
profile at index i only:

    Λ'(i) = Λ(i-1) + Λ(i+1) - Λ(i) + 2ω(F)

where F is the set of facets the two bricks share. Every search below
updates profiles with this identity instead of recomputing them.

An ordering thins to another when a sequence of swaps, each of which does
not increase width, connects them. ``certify_locally_thin`` explores that
reachability relation exactly (up to a budget); ``thin_search`` is the
heuristic that tries to reach a locally thin ordering quickly.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from BackEnd.core.config import get_config
from BackEnd.core.logging_config import get_logger, log_structured, timed
from BackEnd.models.complex import BrickComplex
from BackEnd.models.errors import MoveError, OrderingError, TheoremViolation
from BackEnd.services.orderings import (
    Extremum,
    ExtremumKind,
    Ordering,
    Width,
    extrema,
    level_set,
    profile_values,
    reverse,
    sublevel_set,
    width_from_profile,
)
from BackEnd.services.surfaces import (
    Partition,
    Surface,
    SurfaceClassification,
    Verdict,
    classify_surface,
    strength,
)

logger = get_logger("thinning")


@dataclass(frozen=True)
class SwapCondition:
    lhs: Fraction
    legal: bool
    strict: bool


class MoveKind(str, Enum):
    SWAP = "swap"
    DELAY = "delay"
    ADVANCE = "advance"


@dataclass(frozen=True)
class MoveRecord:
    kind: MoveKind
    parameters: tuple
    width_before: Width
    width_after: Width

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "parameters": list(self.parameters),
            "width_before": self.width_before.as_strings(),
            "width_after": self.width_after.as_strings(),
        }


class CertificateStatus(str, Enum):
    LOCALLY_THIN = "locally-thin"
    NOT_LOCALLY_THIN = "not-locally-thin"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class ThinCertificate:
    status: CertificateStatus
    witness: tuple = ()
    explored: int = 0
    budget: int = 0
    width: Width = field(default_factory=Width)

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "witness": [move.to_dict() for move in self.witness],
            "explored": self.explored,
            "budget": self.budget,
            "width": self.width.as_strings(),
        }


@dataclass(frozen=True)
class ThinResult:
    ordering: Ordering
    moves: tuple
    width: Width
    plateau_exhausted: bool

    def to_dict(self) -> dict:
        return {
            "ordering": list(self.ordering.sequence),
            "moves": [move.to_dict() for move in self.moves],
            "width": self.width.as_strings(),
            "plateau_exhausted": self.plateau_exhausted,
        }


def _check_height(O: Ordering, i: int, context: str) -> None:
    if not 1 <= i <= len(O) - 1:
        raise OrderingError(
            f"height {i} outside 1..{len(O) - 1}", context=context, details={"height": i}
        )


def swap_condition(M: BrickComplex, O: Ordering, i: int) -> SwapCondition:
    """σ(A;S_i) + σ(B;S_i) + 2ω(∂A ⊓ ∂B) for A, B at heights i and i+1."""
    M.require_brick_complex("swap_condition")
    O.check(M)
    _check_height(O, i, "swap_condition")
    a, b = O.brick_at(i), O.brick_at(i + 1)
    surface = level_set(M, O, i)
    lhs = (
        strength(M, a, surface)
        + strength(M, b, surface)
        + 2 * M.weight_of(M.shared_facets(a, b))
    )
    return SwapCondition(lhs, lhs <= 0, lhs < 0)


def _swapped(sequence: tuple, i: int) -> tuple:
    items = list(sequence)
    items[i - 1], items[i] = items[i], items[i - 1]
    return tuple(items)


def apply_swap(M: BrickComplex, O: Ordering, i: int) -> Ordering:
    """Exchange the bricks at heights i and i+1 (no legality check)."""
    O.check(M)
    _check_height(O, i, "apply_swap")
    return Ordering(_swapped(O.sequence, i))


def _dagger_holds(M: BrickComplex, O: Ordering, i: int, j: int) -> bool:
    return strength(M, O.brick_at(i), level_set(M, O, j)) < 0


def delay(M: BrickComplex, O: Ordering, i: int, j: int) -> Ordering:
    """Move the brick at height i up to height j; bricks at i+1..j drop by one.

    Raises:
        MoveError: the brick does not have more weight on S_j than off it.
    """
    M.require_brick_complex("delay")
    O.check(M)
    n = len(O)
    if not (1 <= i < j <= n):
        raise OrderingError(
            f"delay needs 1 <= i < j <= {n}, got i={i}, j={j}",
            context="delay",
            details={"i": i, "j": j},
        )
    if not _dagger_holds(M, O, i, j):
        raise MoveError(
            f"brick at height {i} is not heavier on S_{j} than off it",
            context="delay",
            details={"i": i, "j": j, "brick": O.brick_at(i)},
        )
    items = list(O.sequence)
    brick = items.pop(i - 1)
    items.insert(j - 1, brick)
    return Ordering(tuple(items))


def advance(M: BrickComplex, O: Ordering, j: int, i: int) -> Ordering:
    """Move the brick at height i down to height j+1, through the reverse ordering.

    Raises:
        MoveError: the brick does not have more weight on S_j than off it.
    """
    M.require_brick_complex("advance")
    O.check(M)
    n = len(O)
    if not (0 <= j and j + 1 < i <= n):
        raise OrderingError(
            f"advance needs 0 <= j, j+1 < i <= {n}, got j={j}, i={i}",
            context="advance",
            details={"i": i, "j": j},
        )
    if not _dagger_holds(M, O, i, j):
        raise MoveError(
            f"brick at height {i} is not heavier on S_{j} than off it",
            context="advance",
            details={"i": i, "j": j, "brick": O.brick_at(i)},
        )
    return reverse(delay(M, reverse(O), n - i + 1, n - j))


# -- fast profile arithmetic --------------------------------------------------


def _swapped_profile(M: BrickComplex, sequence: tuple, values: list, i: int) -> list:
    shared = M.weight_of(M.shared_facets(sequence[i - 1], sequence[i]))
    updated = list(values)
    updated[i] = values[i - 1] + values[i + 1] - values[i] + 2 * shared
    return updated


def _neighbours(M: BrickComplex, sequence: tuple, values: list, order: Sequence[int]):
    for i in order:
        new_values = _swapped_profile(M, sequence, values, i)
        yield i, _swapped(sequence, i), new_values, width_from_profile(new_values)


def sweep_macro_moves(M: BrickComplex, O: Ordering, values: Optional[list] = None):
    """(†)-justified delay/advance to a maximum followed by the swap there.

    Yields (width, first index, records, ordering) for each macro move whose
    final swap strictly lowers the width.
    """
    values = profile_values(M, O.sequence) if values is None else values
    before = width_from_profile(values)
    n = len(O)
    maxima = [e for e in extrema(values) if e.kind is ExtremumKind.MAXIMUM]
    for peak in maxima:
        for j in range(peak.plateau[0], peak.plateau[1] + 1):
            surface = level_set(M, O, j)
            for i in range(1, n + 1):
                if i in (j, j + 1) or strength(M, O.brick_at(i), surface) >= 0:
                    continue
                if i < j:
                    kind, parameters, moved = MoveKind.DELAY, (i, j), delay(M, O, i, j)
                else:
                    kind, parameters, moved = MoveKind.ADVANCE, (j, i), advance(M, O, j, i)
                moved_values = profile_values(M, moved.sequence)
                mid = width_from_profile(moved_values)
                if mid > before:
                    continue
                after = width_from_profile(_swapped_profile(M, moved.sequence, moved_values, j))
                if after < mid:
                    records = (
                        MoveRecord(kind, parameters, before, mid),
                        MoveRecord(MoveKind.SWAP, (j,), mid, after),
                    )
                    yield after, min(i, j), records, Ordering(_swapped(moved.sequence, j))


def _best_descent(M: BrickComplex, O: Ordering, values: list):
    """The strictly width-decreasing step with the smallest resulting width, then index."""
    before = width_from_profile(values)
    best = None
    for i, sequence, _, after in _neighbours(M, O.sequence, values, range(1, len(O))):
        if after < before and (best is None or (after, i) < (best[0], best[1])):
            record = MoveRecord(MoveKind.SWAP, (i,), before, after)
            best = (after, i, (record,), Ordering(sequence))
    for candidate in sweep_macro_moves(M, O, values):
        if best is None or (candidate[0], candidate[1]) < (best[0], best[1]):
            best = candidate
    return best


def _greedy(M: BrickComplex, O: Ordering, moves: list) -> Ordering:
    while True:
        values = profile_values(M, O.sequence)
        step = _best_descent(M, O, values)
        if step is None:
            return O
        _, _, records, O = step
        moves.extend(records)
        logger.debug("Greedy step to width %s", [str(t) for t in records[-1].width_after])


def _plateau_escape(
    M: BrickComplex, O: Ordering, budget: int, rng: random.Random
) -> tuple[Optional[tuple], int]:
    """Breadth-first walk over equal-width swaps until some ordering can descend."""
    start_values = profile_values(M, O.sequence)
    width = width_from_profile(start_values)
    parents: dict[tuple, Optional[tuple]] = {O.sequence: None}
    queue: deque = deque([(O.sequence, start_values)])
    order = list(range(1, len(O)))
    explored = 0
    while queue:
        sequence, values = queue.popleft()
        explored += 1
        if explored > budget:
            return None, explored
        if sequence != O.sequence:
            current = Ordering(sequence)
            step = _best_descent(M, current, values)
            if step is not None:
                path: list[MoveRecord] = []
                cursor = sequence
                while parents[cursor] is not None:
                    previous, i = parents[cursor]
                    path.append(MoveRecord(MoveKind.SWAP, (i,), width, width))
                    cursor = previous
                path.reverse()
                return (tuple(path) + step[2], step[3]), explored
        rng.shuffle(order)
        for i, neighbour, new_values, after in _neighbours(M, sequence, values, order):
            if after == width and neighbour not in parents:
                parents[neighbour] = (sequence, i)
                queue.append((neighbour, new_values))
    return None, explored


@timed("thin_search")
def thin_search(
    M: BrickComplex, O: Ordering, budget: Optional[int] = None, seed: int = 0
) -> ThinResult:
    """Descend greedily, then search the equal-width plateau for a way down.

    Deterministic for a given seed. The result is not certified; pass it to
    ``certify_locally_thin`` for that.
    """
    M.require_brick_complex("thin_search")
    O.check(M)
    budget = get_config().search_budget if budget is None else budget
    rng = random.Random(seed)
    moves: list[MoveRecord] = []
    remaining = budget
    exhausted = False

    current = _greedy(M, O, moves)
    while True:
        escape, explored = _plateau_escape(M, current, remaining, rng)
        remaining -= explored
        if escape is None:
            exhausted = remaining >= 0
            break
        records, current = escape
        moves.extend(records)
        current = _greedy(M, current, moves)
        if remaining <= 0:
            break

    width = width_from_profile(profile_values(M, current.sequence))
    log_structured(
        "INFO",
        "thin_search finished",
        {"bricks": len(O), "moves": len(moves), "width": width.as_strings(), "exhausted": exhausted},
        logger_name="thinning",
    )
    return ThinResult(current, tuple(moves), width, exhausted)


@timed("certify_locally_thin")
def certify_locally_thin(
    M: BrickComplex, O: Ordering, budget: Optional[int] = None
) -> ThinCertificate:
    """Decide whether any sequence of width-non-increasing swaps lowers the width.

    Breadth-first over orderings reachable by equal-width swaps, in height
    order; the first strictly descending swap found gives the witness path.
    """
    M.require_brick_complex("certify_locally_thin")
    O.check(M)
    budget = get_config().search_budget if budget is None else budget
    start_values = profile_values(M, O.sequence)
    width = width_from_profile(start_values)
    parents: dict[tuple, Optional[tuple]] = {O.sequence: None}
    queue: deque = deque([(O.sequence, start_values)])
    order = range(1, len(O))
    explored = 0
    while queue:
        if explored >= budget:
            return ThinCertificate(CertificateStatus.UNKNOWN, (), explored, budget, width)
        sequence, values = queue.popleft()
        explored += 1
        for i, neighbour, new_values, after in _neighbours(M, sequence, values, order):
            if after < width:
                path = [MoveRecord(MoveKind.SWAP, (i,), width, after)]
                cursor = sequence
                while parents[cursor] is not None:
                    previous, k = parents[cursor]
                    path.append(MoveRecord(MoveKind.SWAP, (k,), width, width))
                    cursor = previous
                path.reverse()
                return ThinCertificate(
                    CertificateStatus.NOT_LOCALLY_THIN, tuple(path), explored, budget, width
                )
            if after == width and neighbour not in parents:
                parents[neighbour] = (sequence, i)
                queue.append((neighbour, new_values))
    return ThinCertificate(CertificateStatus.LOCALLY_THIN, (), explored, budget, width)


def replay(M: BrickComplex, O: Ordering, moves: Sequence[MoveRecord]) -> Ordering:
    """Apply recorded moves in order."""
    current = O
    for move in moves:
        if move.kind is MoveKind.SWAP:
            current = apply_swap(M, current, move.parameters[0])
        elif move.kind is MoveKind.DELAY:
            current = delay(M, current, *move.parameters)
        else:
            current = advance(M, current, *move.parameters)
    return current


@dataclass(frozen=True)
class ExtractedSurface:
    extremum: Extremum
    height: int
    surface: Surface
    classification: SurfaceClassification
    theorem_checked: Optional[bool]

    @property
    def extremal(self) -> bool:
        return self.extremum.is_extremal_at(self.height)

    def to_dict(self) -> dict:
        return {
            "extremum": self.extremum.to_dict(),
            "height": self.height,
            "extremal": self.extremal,
            "facets": list(self.surface),
            "classification": self.classification.to_dict(),
            "theorem_checked": self.theorem_checked,
        }


def _conforms(
    extremum: Extremum, height: int, classification: SurfaceClassification
) -> Optional[bool]:
    verdict = classification.verdict
    if verdict is Verdict.UNDETERMINED:
        return None
    if extremum.kind is ExtremumKind.MINIMUM:
        return verdict in (Verdict.STABLE, Verdict.EMPTY)
    if extremum.is_extremal_at(height):
        return verdict is Verdict.UNSTABLE
    return verdict in (Verdict.STABLE, Verdict.UNSTABLE)


def _extract_at(
    M: BrickComplex, O: Ordering, extremum: Extremum, height: int, certified: bool
) -> ExtractedSurface:
    surface = level_set(M, O, height)
    hint = None
    if extremum.kind is ExtremumKind.MAXIMUM:
        hint = Partition.from_side_a(M, sublevel_set(O, height))
    classification = classify_surface(M, surface, hint=hint)
    conforms = _conforms(extremum, height, classification)
    if conforms is None:
        logger.warning("Surface at height %d is undetermined", height)
    if certified and conforms is False:
        raise TheoremViolation(
            f"{extremum.kind.value} at height {height} classified {classification.verdict.value}",
            context="extract_minimal_surfaces",
            details={
                "height": height,
                "extremal": extremum.is_extremal_at(height),
                "verdict": classification.verdict.value,
                "strict_moves": list(classification.strict_moves),
            },
        )
    return ExtractedSurface(extremum, height, surface, classification, conforms)


@timed("extract_minimal_surfaces")
def extract_minimal_surfaces(
    M: BrickComplex, O: Ordering, certified: bool = False
) -> list[ExtractedSurface]:
    """Level sets at every height of every extremum plateau, classified.

    Maxima are first checked against the sublevel/superlevel split, then by
    full search. With ``certified`` (the ordering passed
    ``certify_locally_thin``) any classification that contradicts the main
    theorem raises.

    Raises:
        TheoremViolation: a certified ordering produced a non-conforming surface.
    """
    M.require_brick_complex("extract_minimal_surfaces")
    O.check(M)
    values = profile_values(M, O.sequence)
    results: list[ExtractedSurface] = []
    for extremum in extrema(values):
        for height in extremum.heights:
            results.append(_extract_at(M, O, extremum, height, certified))
    return results
