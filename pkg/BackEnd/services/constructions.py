"""Constructions on brick complexes.

- connected sum of two closed pseudomanifolds (vertex-level for simplicial
  inputs, facet-level for generic ones)
- stabilization of a simplicial brick and two-dimensional edge flips
- random pseudomanifolds for property suites
- the named catalog, including the disc and torus fixtures used to replay
  the worked examples
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Optional, Sequence

from BackEnd.core.logging_config import get_logger
from BackEnd.models.complex import (
    BrickComplex,
    BrickId,
    FacetId,
    from_simplices,
    sort_key,
    sorted_ids,
    validate,
)
from BackEnd.models.errors import ComplexError, SchemaError, UnknownIdentifierError
from BackEnd.models.weights import ONE

logger = get_logger("constructions")


@dataclass(frozen=True)
class ConnectedSum:
    """A glued complex plus where each factor brick ended up."""

    complex: BrickComplex
    first: Mapping[BrickId, BrickId]
    second: Mapping[BrickId, BrickId]
    interface: frozenset


def _require_closed_pseudomanifold(M: BrickComplex, name: str) -> None:
    M.require_brick_complex("connected_sum")
    report = validate(M)
    if not report.is_closed_pseudomanifold:
        raise ComplexError(
            f"{name} must be a closed pseudomanifold",
            context="connected_sum",
            details={"operand": name, **report.to_dict()},
        )


def build_connected_sum(
    M1: BrickComplex,
    M2: BrickComplex,
    C1: BrickId,
    C2: BrickId,
    vertex_map: Optional[Mapping[int, int]] = None,
    boundary_map: Optional[Mapping[FacetId, FacetId]] = None,
) -> ConnectedSum:
    """Remove C1 and C2 and glue the two resulting boundaries.

    Exactly one of ``vertex_map`` (vertices of C1 to vertices of C2, simplicial
    inputs only) or ``boundary_map`` (facets of C1 to facets of C2) selects the
    gluing. The bricks of the result are numbered 0.. with the survivors of
    M1 first, each factor in its own brick order.
    """
    if M1.dimension != M2.dimension:
        raise ComplexError(
            f"dimension mismatch: {M1.dimension} vs {M2.dimension}",
            context="connected_sum",
            details={"dimensions": [M1.dimension, M2.dimension]},
        )
    M1.require_brick(C1, "connected_sum")
    M2.require_brick(C2, "connected_sum")
    _require_closed_pseudomanifold(M1, "first operand")
    _require_closed_pseudomanifold(M2, "second operand")

    if (vertex_map is None) == (boundary_map is None):
        raise ComplexError(
            "give exactly one of a vertex map or a boundary facet map", context="connected_sum"
        )
    if vertex_map is not None:
        result = _simplicial_sum(M1, M2, C1, C2, vertex_map)
    else:
        result = _generic_sum(M1, M2, C1, C2, boundary_map or {})

    logger.info(
        "Connected sum: %d + %d bricks -> %d bricks, %d interface facets",
        M1.size,
        M2.size,
        result.complex.size,
        len(result.interface),
    )
    return result


def connected_sum(
    M1: BrickComplex,
    M2: BrickComplex,
    C1: BrickId,
    C2: BrickId,
    vertex_map: Optional[Mapping[int, int]] = None,
    boundary_map: Optional[Mapping[FacetId, FacetId]] = None,
) -> BrickComplex:
    """The glued complex; its ``interface`` records the image of the boundary of C1."""
    return build_connected_sum(M1, M2, C1, C2, vertex_map, boundary_map).complex


def _simplicial_sum(
    M1: BrickComplex, M2: BrickComplex, C1: BrickId, C2: BrickId, vertex_map: Mapping[int, int]
) -> ConnectedSum:
    if M1.vertices is None or M2.vertices is None:
        raise ComplexError(
            "a vertex map needs simplicial inputs on both sides", context="connected_sum"
        )
    c1_vertices, c2_vertices = set(M1.vertices[C1]), set(M2.vertices[C2])
    if set(vertex_map) != c1_vertices or set(vertex_map.values()) != c2_vertices:
        raise ComplexError(
            "vertex map is not a bijection between the removed simplices",
            context="connected_sum",
            details={"first": sorted(c1_vertices), "second": sorted(c2_vertices)},
        )
    if len(set(vertex_map.values())) != len(vertex_map):
        raise ComplexError("vertex map is not injective", context="connected_sum")

    inverse = {w: v for v, w in vertex_map.items()}
    m1_vertices = M1.vertex_set()
    if not all(isinstance(v, int) for v in m1_vertices | M2.vertex_set()):
        raise ComplexError("simplicial gluing needs integer vertex ids", context="connected_sum")
    offset = max(m1_vertices) + 1
    fresh = {
        v: offset + k
        for k, v in enumerate(sorted(M2.vertex_set() - c2_vertices))
    }

    def relabel(v: int) -> int:
        return inverse[v] if v in inverse else fresh[v]

    simplices: list[tuple] = []
    first: dict[BrickId, BrickId] = {}
    second: dict[BrickId, BrickId] = {}
    for brick in M1.brick_ids:
        if brick != C1:
            first[brick] = len(simplices)
            simplices.append(M1.vertices[brick])
    for brick in M2.brick_ids:
        if brick != C2:
            second[brick] = len(simplices)
            simplices.append(tuple(sorted(relabel(v) for v in M2.vertices[brick])))

    interface = frozenset(M1.bricks[C1])
    weights: dict[tuple, Fraction] = {}
    for facet_id, facet in M1.facets.items():
        weights[facet_id] = facet.weight
    for facet_id, facet in M2.facets.items():
        mapped = tuple(sorted(relabel(v) for v in facet_id))
        if mapped in interface and weights.get(mapped, facet.weight) != facet.weight:
            logger.warning("Interface facet %s has different weights; keeping the first", mapped)
            continue
        weights.setdefault(mapped, facet.weight)

    non_unit = {f: w for f, w in weights.items() if w != ONE}
    try:
        glued = from_simplices(simplices, weights=non_unit, labels=list(range(len(simplices))))
    except ComplexError as exc:
        raise ComplexError(
            f"gluing does not produce a simplicial brick complex: {exc.message}",
            context="connected_sum",
            details=exc.details,
        ) from exc
    return ConnectedSum(glued.with_interface(interface), first, second, interface)


def _ridge_map(
    M1: BrickComplex, M2: BrickComplex, C1: BrickId, C2: BrickId, phi: Mapping[FacetId, FacetId]
) -> dict:
    ridges_1 = {r for f in M1.bricks[C1] for r in M1.facets[f].ridges}
    ridges_2 = {r for f in M2.bricks[C2] for r in M2.facets[f].ridges}
    mapping: dict = {}
    for ridge in ridges_1:
        holders = [f for f in M1.bricks[C1] if ridge in M1.facets[f].ridges]
        images = [phi[f] for f in holders]
        common = set.intersection(*(set(M2.facets[g].ridges) for g in images)) & ridges_2
        candidates = [
            r
            for r in common
            if {g for g in M2.bricks[C2] if r in M2.facets[g].ridges} == set(images)
        ]
        if len(candidates) != 1:
            raise ComplexError(
                f"facet map is not ridge-consistent at ridge {ridge!r}",
                context="connected_sum",
                details={"ridge": ridge, "facets": holders},
            )
        mapping[ridge] = candidates[0]
    if len(set(mapping.values())) != len(mapping) or set(mapping.values()) != ridges_2:
        raise ComplexError("facet map does not induce a ridge bijection", context="connected_sum")
    return mapping


def _generic_sum(
    M1: BrickComplex,
    M2: BrickComplex,
    C1: BrickId,
    C2: BrickId,
    boundary_map: Mapping[FacetId, FacetId],
) -> ConnectedSum:
    phi = dict(boundary_map)
    if set(phi) != set(M1.bricks[C1]) or set(phi.values()) != set(M2.bricks[C2]):
        raise ComplexError(
            "boundary map is not a bijection between the removed bricks' facets",
            context="connected_sum",
        )
    if len(set(phi.values())) != len(phi):
        raise ComplexError("boundary map is not injective", context="connected_sum")

    ridge_map = _ridge_map(M1, M2, C1, C2, phi)
    ridge_inverse = {r2: r1 for r1, r2 in ridge_map.items()}
    facet_inverse = {g: f for f, g in phi.items()}

    def rename_facet(g: FacetId) -> FacetId:
        return facet_inverse[g] if g in facet_inverse else ("#2", g)

    def rename_ridge(r):
        return ridge_inverse[r] if r in ridge_inverse else ("#2", r)

    facets: dict[FacetId, tuple] = {f: (facet.ridges, facet.weight) for f, facet in M1.facets.items()}
    for g, facet in M2.facets.items():
        renamed = rename_facet(g)
        if g in facet_inverse:
            continue
        if renamed in facets:
            raise ComplexError(
                f"facet id {renamed!r} collides after gluing", context="connected_sum"
            )
        facets[renamed] = (frozenset(rename_ridge(r) for r in facet.ridges), facet.weight)

    bricks: dict[BrickId, list] = {}
    first: dict[BrickId, BrickId] = {}
    second: dict[BrickId, BrickId] = {}
    for brick in M1.brick_ids:
        if brick != C1:
            first[brick] = len(bricks)
            bricks[len(bricks)] = list(M1.bricks[brick])
    for brick in M2.brick_ids:
        if brick != C2:
            second[brick] = len(bricks)
            bricks[len(bricks)] = [rename_facet(g) for g in M2.bricks[brick]]

    interface = frozenset(M1.bricks[C1])
    glued = BrickComplex.from_parts(M1.dimension, bricks, facets, interface=interface)
    return ConnectedSum(glued, first, second, interface)


def _next_labels(M: BrickComplex, anchor: BrickId, count: int) -> list:
    labels = list(M.bricks)
    if all(isinstance(label, int) and not isinstance(label, bool) for label in labels):
        start = max(labels) + 1
        return list(range(start, start + count))
    return [(anchor, k) for k in range(count)]


def stabilize(M: BrickComplex, A: BrickId) -> tuple[BrickComplex, list]:
    """Cone the boundary of A from a new interior vertex.

    A is replaced by n+1 bricks appended after the existing ones. Facets
    through the new vertex get weight 1; old facets keep their weights.
    """
    M.require_brick(A, "stabilize")
    if M.vertices is None:
        raise ComplexError(
            "stabilization needs simplicial provenance",
            context="stabilize",
            details={"brick": A},
        )
    new_vertex = max(M.vertex_set()) + 1
    new_labels = _next_labels(M, A, M.dimension + 1)

    labels: list = []
    simplices: list[tuple] = []
    for brick in M.brick_ids:
        if brick != A:
            labels.append(brick)
            simplices.append(M.vertices[brick])
    for label, face in zip(new_labels, combinations(M.vertices[A], M.dimension)):
        labels.append(label)
        simplices.append(tuple(face) + (new_vertex,))

    weights = {f: facet.weight for f, facet in M.facets.items() if facet.weight != ONE}
    stabilized = from_simplices(simplices, weights=weights, labels=labels, kind=M.kind)
    logger.debug("Stabilized brick %r into %s", A, new_labels)
    return stabilized.with_interface(M.interface), new_labels


def flip_edge(M: BrickComplex, facet_id: FacetId) -> BrickComplex:
    """Two-dimensional 2-2 move: replace the diagonal shared by two triangles with the other one."""
    M.require_facet(facet_id, "flip_edge")
    if M.vertices is None or M.dimension != 2:
        raise ComplexError("edge flips need a simplicial surface", context="flip_edge")
    facet = M.facets[facet_id]
    if len(facet.incidence) != 2:
        raise ComplexError(
            f"edge {facet_id!r} is not interior", context="flip_edge", details={"facet": facet_id}
        )
    a, b = facet.incidence
    (p,) = set(M.vertices[a]) - set(facet_id)
    (q,) = set(M.vertices[b]) - set(facet_id)
    new_edge = tuple(sorted((p, q)))
    if p == q or new_edge in M.facets:
        raise ComplexError(
            f"flipping {facet_id!r} would duplicate edge {new_edge!r}",
            context="flip_edge",
            details={"facet": facet_id},
        )
    u, v = facet_id
    replaced = {a: (u, p, q), b: (v, p, q)}
    simplices = [tuple(sorted(replaced.get(brick, M.vertices[brick]))) for brick in M.brick_ids]
    weights = {
        f: other.weight for f, other in M.facets.items() if f != facet_id and other.weight != ONE
    }
    return from_simplices(simplices, weights=weights, labels=list(M.brick_ids), kind=M.kind)


def random_pseudomanifold(
    rng: random.Random,
    max_bricks: int,
    dimension: int = 2,
    weight_choices: Optional[Sequence[Fraction]] = None,
    steps: Optional[int] = None,
) -> BrickComplex:
    """A random closed pseudomanifold grown from the boundary of a simplex.

    Stabilizations (and edge flips in dimension 2) are applied while the
    brick count stays within ``max_bricks``. With ``weight_choices`` every
    facet gets a weight drawn from it.
    """
    if max_bricks < dimension + 2:
        raise ComplexError(
            f"the smallest closed {dimension}-pseudomanifold has {dimension + 2} bricks",
            context="random_pseudomanifold",
        )
    M = boundary_simplex(dimension)
    steps = rng.randint(0, 6) if steps is None else steps
    for _ in range(steps):
        can_grow = M.size + dimension <= max_bricks
        if dimension == 2 and (not can_grow or rng.random() < 0.5):
            candidates = [
                f
                for f in sorted_ids(M.interior_facets)
                if _flippable(M, f)
            ]
            if candidates:
                M = flip_edge(M, rng.choice(candidates))
                continue
        if can_grow:
            M, _ = stabilize(M, rng.choice(list(M.brick_ids)))

    if weight_choices:
        weights = {f: rng.choice(list(weight_choices)) for f in sorted_ids(M.facets)}
        M = from_simplices(
            [M.vertices[b] for b in M.brick_ids], weights=weights, labels=list(M.brick_ids)
        )
    return M


def _flippable(M: BrickComplex, facet_id: FacetId) -> bool:
    a, b = M.facets[facet_id].incidence
    extra = (set(M.vertices[a]) | set(M.vertices[b])) - set(facet_id)
    if len(extra) != 2:
        return False
    return tuple(sorted(extra)) not in M.facets


# -- catalog ----------------------------------------------------------------

def tetrahedron() -> BrickComplex:
    return boundary_simplex(2)


def boundary_simplex(n: int) -> BrickComplex:
    """The boundary of the (n+1)-simplex, an n-dimensional sphere with n+2 bricks."""
    if n < 1:
        raise SchemaError(f"boundary-simplex needs n >= 1, got {n}", context="catalog")
    return from_simplices([tuple(s) for s in combinations(range(n + 2), n + 1)])


def octahedron() -> BrickComplex:
    """The octahedral 2-sphere: one vertex from each antipodal pair per triangle."""
    pairs = [(0, 1), (2, 3), (4, 5)]
    simplices = [(x, y, z) for x in pairs[0] for y in pairs[1] for z in pairs[2]]
    return from_simplices(simplices)


def torus_vertex(x: int, y: int) -> int:
    return (x % 3) + 3 * (y % 3)


def _torus_lower(c: int, r: int) -> tuple:
    return (torus_vertex(c, r), torus_vertex(c + 1, r), torus_vertex(c, r + 1))


def _torus_upper(c: int, r: int) -> tuple:
    return (torus_vertex(c + 1, r), torus_vertex(c, r + 1), torus_vertex(c + 1, r + 1))


# label of the lower and upper triangle in grid square (column, row)
TORUS18_LABELS: dict[tuple[int, int], tuple[int, int]] = {
    (0, 0): (1, 10),
    (0, 1): (11, 8),
    (0, 2): (3, 2),
    (1, 0): (12, 9),
    (1, 1): (7, 13),
    (1, 2): (14, 15),
    (2, 0): (6, 5),
    (2, 1): (17, 18),
    (2, 2): (16, 4),
}

TORUS_SWEEP_ORDER: tuple[int, ...] = tuple(range(1, 19))


def torus18() -> BrickComplex:
    """The 3x3 grid triangulation of the torus with the worked-example labels 1-18."""
    by_label: dict[int, tuple] = {}
    for (c, r), (lower, upper) in TORUS18_LABELS.items():
        by_label[lower] = _torus_lower(c, r)
        by_label[upper] = _torus_upper(c, r)
    labels = sorted(by_label)
    return from_simplices([by_label[label] for label in labels], labels=labels)


def _edge(a: int, b: int) -> tuple:
    return tuple(sorted((a, b)))


def torus_lines() -> dict[str, frozenset]:
    """The three horizontal, three vertical and three diagonal lines of torus18."""
    lines: dict[str, frozenset] = {}
    for r in range(3):
        lines[f"horizontal-{r}"] = frozenset(
            _edge(torus_vertex(c, r), torus_vertex(c + 1, r)) for c in range(3)
        )
    for c in range(3):
        lines[f"vertical-{c}"] = frozenset(
            _edge(torus_vertex(c, r), torus_vertex(c, r + 1)) for r in range(3)
        )
    for k in range(3):
        lines[f"diagonal-{k}"] = frozenset(
            _edge(torus_vertex(c + 1, (k - c) % 3), torus_vertex(c, (k - c) % 3 + 1))
            for c in range(3)
        )
    return lines


def vertex_link(M: BrickComplex, vertex: int) -> frozenset:
    """Facets opposite ``vertex`` in the bricks containing it."""
    if M.vertices is None:
        raise ComplexError("vertex links need simplicial provenance", context="vertex_link")
    link = frozenset(
        tuple(v for v in simplex if v != vertex)
        for simplex in M.vertices.values()
        if vertex in simplex
    )
    if not link:
        raise UnknownIdentifierError(
            f"unknown vertex {vertex!r}", context="vertex_link", details={"vertex": vertex}
        )
    return link


def _disc_vertex(x: int, y: int) -> int:
    return x + 4 * y


def grid_disc() -> BrickComplex:
    """A 3x3 grid disc; square (x, y) holds bricks 2(3y+x)+1 (lower) and 2(3y+x)+2 (upper)."""
    labels: list[int] = []
    simplices: list[tuple] = []
    for y in range(3):
        for x in range(3):
            base = 2 * (3 * y + x)
            labels.append(base + 1)
            simplices.append(
                (_disc_vertex(x, y), _disc_vertex(x + 1, y), _disc_vertex(x + 1, y + 1))
            )
            labels.append(base + 2)
            simplices.append(
                (_disc_vertex(x, y), _disc_vertex(x, y + 1), _disc_vertex(x + 1, y + 1))
            )
    return from_simplices(simplices, labels=labels)


DISC_CURVE: frozenset = frozenset(
    {
        _edge(_disc_vertex(1, 0), _disc_vertex(2, 1)),
        _edge(_disc_vertex(2, 1), _disc_vertex(1, 1)),
        _edge(_disc_vertex(1, 1), _disc_vertex(2, 2)),
        _edge(_disc_vertex(2, 2), _disc_vertex(2, 3)),
    }
)
DISC_MOVES: tuple[int, int] = (4, 9)


_BOUNDARY_SIMPLEX_RE = re.compile(r"^boundary-simplex\((\d+)\)$")

CATALOG_NAMES = ("tetrahedron", "boundary-simplex(n)", "torus18", "figure4", "octahedron")


def catalog(name: str) -> BrickComplex:
    """Named complexes: tetrahedron, boundary-simplex(n), torus18, figure4, octahedron."""
    key = name.strip()
    builders = {
        "tetrahedron": tetrahedron,
        "torus18": torus18,
        "figure4": grid_disc,
        "octahedron": octahedron,
    }
    if key in builders:
        return builders[key]()
    match = _BOUNDARY_SIMPLEX_RE.match(key)
    if match:
        return boundary_simplex(int(match.group(1)))
    raise SchemaError(
        f"unknown catalog entry {name!r}",
        context="catalog",
        details={"known": list(CATALOG_NAMES)},
    )


def relabel_vertices_for_sum(M: BrickComplex, C: BrickId, other: BrickComplex, D: BrickId) -> dict:
    """The order-preserving vertex bijection between two simplices, handy for catalog sums."""
    if M.vertices is None or other.vertices is None:
        raise ComplexError("vertex maps need simplicial provenance", context="connected_sum")
    return dict(zip(sorted(M.vertices[C], key=sort_key), sorted(other.vertices[D], key=sort_key)))


__all__ = [
    "CATALOG_NAMES",
    "ConnectedSum",
    "DISC_CURVE",
    "DISC_MOVES",
    "TORUS_SWEEP_ORDER",
    "TORUS18_LABELS",
    "boundary_simplex",
    "build_connected_sum",
    "catalog",
    "connected_sum",
    "flip_edge",
    "grid_disc",
    "octahedron",
    "random_pseudomanifold",
    "relabel_vertices_for_sum",
    "stabilize",
    "tetrahedron",
    "torus18",
    "torus_lines",
    "torus_vertex",
    "vertex_link",
]
