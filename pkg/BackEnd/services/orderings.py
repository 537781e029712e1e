"""Orderings of bricks, level sets, Λ profiles and width.

Heights are 1-based: ``O.brick_at(1)`` is the first brick placed and the
sublevel set at height j holds the first j bricks. Profiles are indexed
0..N with Λ(0) = Λ(N) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property, total_ordering
from typing import Iterable, Iterator, Mapping, Sequence

from BackEnd.core.logging_config import get_logger
from BackEnd.models.complex import BrickComplex, BrickId, sort_key
from BackEnd.models.errors import ConsistencyError, OrderingError
from BackEnd.models.weights import ZERO, format_weights
from BackEnd.services.surfaces import Surface, boundary_of_bricks, strength, vary

logger = get_logger("orderings")


@dataclass(frozen=True)
class Ordering:
    """A bijection from bricks to heights 1..N, stored bottom to top."""

    sequence: tuple

    @classmethod
    def of(cls, bricks: Iterable[BrickId]) -> "Ordering":
        return cls(tuple(bricks))

    @classmethod
    def from_heights(cls, heights: Mapping[BrickId, int]) -> "Ordering":
        n = len(heights)
        if sorted(heights.values()) != list(range(1, n + 1)):
            raise OrderingError(
                "heights must be exactly 1..N", context="ordering", details={"bricks": n}
            )
        return cls(tuple(sorted(heights, key=lambda brick: heights[brick])))

    def __len__(self) -> int:
        return len(self.sequence)

    def __iter__(self) -> Iterator[BrickId]:
        return iter(self.sequence)

    @cached_property
    def _heights(self) -> dict:
        return {brick: position + 1 for position, brick in enumerate(self.sequence)}

    def brick_at(self, height: int) -> BrickId:
        if not 1 <= height <= len(self.sequence):
            raise OrderingError(
                f"height {height} outside 1..{len(self.sequence)}",
                context="ordering",
                details={"height": height},
            )
        return self.sequence[height - 1]

    def height_of(self, brick: BrickId) -> int:
        try:
            return self._heights[brick]
        except KeyError:
            raise OrderingError(
                f"brick {brick!r} is not in the ordering", context="ordering", details={"brick": brick}
            ) from None

    def check(self, M: BrickComplex) -> "Ordering":
        """Raise unless this is a bijection onto the bricks of ``M``."""
        if len(set(self.sequence)) != len(self.sequence):
            seen: set = set()
            repeated = [b for b in self.sequence if b in seen or seen.add(b)]
            raise OrderingError(
                "ordering repeats a brick", context="ordering", details={"bricks": repeated}
            )
        missing = set(M.bricks) - set(self.sequence)
        extra = set(self.sequence) - set(M.bricks)
        if missing or extra:
            raise OrderingError(
                "ordering is not a bijection onto the bricks",
                context="ordering",
                details={
                    "missing": sorted(missing, key=sort_key),
                    "unknown": sorted(extra, key=sort_key),
                },
            )
        return self


def sublevel_set(O: Ordering, j: int) -> frozenset:
    """M_j: the bricks at heights 1..j."""
    if not 0 <= j <= len(O):
        raise OrderingError(
            f"height {j} outside 0..{len(O)}", context="sublevel_set", details={"height": j}
        )
    return frozenset(O.sequence[:j])


def level_set(M: BrickComplex, O: Ordering, j: int) -> Surface:
    """S_j: interior facets between the first j bricks and the rest."""
    M.require_brick_complex("level_set")
    O.check(M)
    return boundary_of_bricks(M, sublevel_set(O, j))


@dataclass(frozen=True)
class LambdaProfile:
    values: tuple

    def __getitem__(self, j: int) -> Fraction:
        return self.values[j]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.values)

    @property
    def bricks(self) -> int:
        return len(self.values) - 1

    def as_strings(self) -> list[str]:
        return format_weights(self.values)


def profile_values(M: BrickComplex, sequence: Sequence[BrickId]) -> list[Fraction]:
    """Incremental Λ over the neighbour table, without cross-checking."""
    neighbors = M.neighbor_weights
    placed: set = set()
    values = [ZERO]
    current = ZERO
    for brick in sequence:
        for other, weight in neighbors[brick]:
            current += -weight if other in placed else weight
        placed.add(brick)
        values.append(current)
    return values


def lambda_profile(M: BrickComplex, O: Ordering, cross_check: bool = True) -> LambdaProfile:
    """Λ(0..N), built by variation across each brick in turn.

    With ``cross_check`` every value is compared with the weight of the
    directly computed level set.

    Raises:
        ConsistencyError: the two computations disagree.
    """
    M.require_brick_complex("lambda_profile")
    O.check(M)
    surface = Surface()
    values = [ZERO]
    for brick in O.sequence:
        values.append(values[-1] + strength(M, brick, surface))
        surface = vary(M, surface, brick)

    if cross_check:
        for j in range(len(values)):
            direct = M.weight_of(boundary_of_bricks(M, O.sequence[:j]).facets)
            if direct != values[j]:
                raise ConsistencyError(
                    f"incremental and direct level-set weights disagree at height {j}",
                    context="lambda_profile",
                    details={"height": j, "incremental": str(values[j]), "direct": str(direct)},
                )
    if values[-1] != ZERO:
        raise ConsistencyError(
            "the top level set is not empty", context="lambda_profile", details={"value": str(values[-1])}
        )
    return LambdaProfile(tuple(values))


class ExtremumKind(str, Enum):
    MAXIMUM = "maximum"
    MINIMUM = "minimum"


@dataclass(frozen=True)
class Extremum:
    """A plateau of maxima or minima, reported once with t at its left end.

    Every height on the plateau is a maximum (or minimum); only the two ends
    are extremal.
    """

    kind: ExtremumKind
    t: int
    plateau: tuple[int, int]
    value: Fraction

    @property
    def heights(self) -> range:
        lo, hi = self.plateau
        return range(lo, hi + 1)

    @property
    def endpoints(self) -> tuple[int, ...]:
        lo, hi = self.plateau
        return (lo,) if lo == hi else (lo, hi)

    def is_extremal_at(self, height: int) -> bool:
        return height in self.endpoints

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "t": self.t,
            "plateau": list(self.plateau),
            "endpoints": list(self.endpoints),
            "value": str(self.value),
        }


def _values_of(profile: LambdaProfile | Sequence[Fraction]) -> Sequence[Fraction]:
    return profile.values if isinstance(profile, LambdaProfile) else profile


def extrema(profile: LambdaProfile | Sequence[Fraction]) -> list[Extremum]:
    """Maximal runs of equal values inside 1..N-1 bounded by strict rises or falls."""
    values = _values_of(profile)
    n = len(values) - 1
    found: list[Extremum] = []
    lo = 1
    while lo <= n - 1:
        hi = lo
        while hi + 1 <= n - 1 and values[hi + 1] == values[lo]:
            hi += 1
        before, level, after = values[lo - 1], values[lo], values[hi + 1]
        kind = None
        if before < level and after < level:
            kind = ExtremumKind.MAXIMUM
        elif before > level and after > level:
            kind = ExtremumKind.MINIMUM
        if kind is not None:
            found.append(Extremum(kind, lo, (lo, hi), level))
        lo = hi + 1
    return found


@total_ordering
@dataclass(frozen=True)
class Width:
    """Values of Λ at the maxima, non-increasing; compared lexicographically, prefix first."""

    terms: tuple = ()

    @classmethod
    def of(cls, values: Iterable[Fraction]) -> "Width":
        return cls(tuple(sorted((Fraction(v) for v in values), reverse=True)))

    def __lt__(self, other: "Width") -> bool:
        if not isinstance(other, Width):
            return NotImplemented
        return self.terms < other.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.terms)

    @property
    def leading(self) -> Fraction:
        return self.terms[0] if self.terms else ZERO

    def as_strings(self) -> list[str]:
        return format_weights(self.terms)


def width_from_profile(profile: LambdaProfile | Sequence[Fraction]) -> Width:
    return Width.of(e.value for e in extrema(profile) if e.kind is ExtremumKind.MAXIMUM)


def trunk_from_profile(profile: LambdaProfile | Sequence[Fraction]) -> Fraction:
    return max(_values_of(profile), default=ZERO)


def width_of(M: BrickComplex, O: Ordering) -> Width:
    return width_from_profile(lambda_profile(M, O, cross_check=False))


def trunk_of(M: BrickComplex, O: Ordering) -> Fraction:
    return trunk_from_profile(lambda_profile(M, O, cross_check=False))


class Comparison(str, Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"


def compare_widths(w1: Width | Sequence[Fraction], w2: Width | Sequence[Fraction]) -> Comparison:
    a = w1.terms if isinstance(w1, Width) else tuple(w1)
    b = w2.terms if isinstance(w2, Width) else tuple(w2)
    if a == b:
        return Comparison.EQUAL
    return Comparison.LESS if a < b else Comparison.GREATER


def reverse(O: Ordering) -> Ordering:
    return Ordering(tuple(reversed(O.sequence)))


def width_union(w1: Width, w2: Width) -> Width:
    return Width.of(list(w1.terms) + list(w2.terms))
