"""Reading and writing brickcplx-v1 documents.

Complex documents come in two shapes::

    {"format": "brickcplx-v1", "dimension": 2, "kind": "brick-complex",
     "simplices": [[0, 1, 2], ...], "weights": {"0,1": "1/2"}, "labels": [...]}

    {"format": "brickcplx-v1", "dimension": 2, "kind": "brick-complex",
     "bricks": [{"id": "A", "facets": ["a", "b", "c"]}, ...],
     "facets": [{"id": "a", "ridges": ["p", "q"], "weight": "1"}, ...]}

Identifiers are integers, strings, or (nested) lists, which become tuples.
Weights are integers or "p/q" strings; floating-point literals are refused.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

from BackEnd.models.complex import (
    BrickComplex,
    ComplexKind,
    from_simplices,
    sorted_ids,
)
from BackEnd.models.errors import SchemaError
from BackEnd.models.weights import ONE, format_weight, parse_weight
from BackEnd.services.orderings import Ordering
from BackEnd.services.surfaces import Surface

FORMAT = "brickcplx-v1"


def _reject_float(literal: str) -> Any:
    raise SchemaError(
        f"floating-point literal {literal} is not an exact weight; use an integer or a \"p/q\" string",
        context="parse",
        details={"literal": literal},
    )


def loads(text: str) -> Any:
    """json.loads that refuses floating-point literals."""
    try:
        return json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as e:
        raise SchemaError(f"not valid JSON: {e.msg} at line {e.lineno}", context="parse") from e


def read_document(path: str | Path) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SchemaError(
            f"cannot read {path}: {e.strerror}", context="read", details={"path": str(path)}
        ) from e
    return loads(text)


def to_identifier(raw: Any, where: str = "identifier") -> Any:
    """JSON value -> hashable id: lists become tuples, recursively."""
    if isinstance(raw, bool) or raw is None or isinstance(raw, dict):
        raise SchemaError(f"{where}: {raw!r} is not an identifier", context="parse")
    if isinstance(raw, list):
        return tuple(to_identifier(item, where) for item in raw)
    if isinstance(raw, (int, str)):
        return raw
    raise SchemaError(f"{where}: {raw!r} is not an identifier", context="parse")


def to_jsonable(value: Any) -> Any:
    if isinstance(value, tuple):
        return [to_jsonable(item) for item in value]
    return value


def parse_identifier(text: str) -> Any:
    """An id given on the command line: JSON when it parses, otherwise the bare string."""
    try:
        return to_identifier(json.loads(text), "identifier")
    except (json.JSONDecodeError, SchemaError):
        return text


def _require(document: Mapping, key: str, kinds: tuple, where: str) -> Any:
    if key not in document:
        raise SchemaError(f"{where}: missing field {key!r}", context="parse")
    value = document[key]
    if isinstance(value, bool) or not isinstance(value, kinds):
        raise SchemaError(f"{where}: field {key!r} has the wrong type", context="parse")
    return value


def _vertex(raw: Any) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise SchemaError(f"vertex {raw!r} is not an integer", context="parse")
    return raw


def _weight_key(key: str) -> tuple:
    try:
        return tuple(sorted(int(part) for part in key.split(",")))
    except ValueError:
        raise SchemaError(
            f"weight key {key!r} is not a comma-separated vertex list", context="parse"
        ) from None


def _parse_simplicial(document: Mapping, dimension: int, kind: ComplexKind) -> BrickComplex:
    simplices = _require(document, "simplices", (list,), "complex")
    rows = []
    for row in simplices:
        if not isinstance(row, list):
            raise SchemaError("each simplex must be a list of vertices", context="parse")
        rows.append([_vertex(v) for v in row])
    if rows and len(rows[0]) != dimension + 1:
        raise SchemaError(
            f"dimension {dimension} needs {dimension + 1} vertices per simplex, got {len(rows[0])}",
            context="parse",
        )

    raw_weights = document.get("weights") or {}
    if not isinstance(raw_weights, dict):
        raise SchemaError("weights must be an object", context="parse")
    weights = {
        _weight_key(key): parse_weight(value, f"weight of {key!r}") for key, value in raw_weights.items()
    }

    labels = document.get("labels")
    if labels is not None:
        if not isinstance(labels, list):
            raise SchemaError("labels must be a list", context="parse")
        labels = [to_identifier(label, "label") for label in labels]

    complex_ = from_simplices(rows, weights=weights, labels=labels, kind=kind)
    return _with_interface(complex_, document)


def _parse_generic(document: Mapping, dimension: int, kind: ComplexKind) -> BrickComplex:
    raw_bricks = _require(document, "bricks", (list,), "complex")
    raw_facets = _require(document, "facets", (list,), "complex")

    facets: dict = {}
    for entry in raw_facets:
        if not isinstance(entry, dict):
            raise SchemaError("each facet must be an object", context="parse")
        facet_id = to_identifier(entry.get("id"), "facet id")
        if facet_id in facets:
            raise SchemaError(f"duplicate facet {entry.get('id')!r}", context="parse")
        ridges = _require(entry, "ridges", (list,), f"facet {entry.get('id')!r}")
        weight = ONE
        if "weight" in entry:
            weight = parse_weight(entry["weight"], f"weight of facet {entry.get('id')!r}")
        facets[facet_id] = ([to_identifier(r, "ridge id") for r in ridges], weight)

    bricks: dict = {}
    for entry in raw_bricks:
        if not isinstance(entry, dict):
            raise SchemaError("each brick must be an object", context="parse")
        brick_id = to_identifier(entry.get("id"), "brick id")
        if brick_id in bricks:
            raise SchemaError(f"duplicate brick {entry.get('id')!r}", context="parse")
        facet_ids = _require(entry, "facets", (list,), f"brick {entry.get('id')!r}")
        bricks[brick_id] = [to_identifier(f, "facet id") for f in facet_ids]

    complex_ = BrickComplex.from_parts(dimension, bricks, facets, kind=kind)
    return _with_interface(complex_, document)


def _with_interface(complex_: BrickComplex, document: Mapping) -> BrickComplex:
    interface = document.get("interface")
    if not interface:
        return complex_
    return complex_.with_interface(to_identifier(f, "interface facet") for f in interface)


def parse_complex(document: str | Mapping) -> BrickComplex:
    """Build a validated complex from a document or its JSON text.

    Raises:
        SchemaError: malformed document, wrong format tag, float literals.
        ComplexError: structural violations found while assembling.
    """
    if isinstance(document, str):
        document = loads(document)
    if not isinstance(document, dict):
        raise SchemaError("a complex document must be a JSON object", context="parse")
    if document.get("format") != FORMAT:
        raise SchemaError(
            f"unsupported format {document.get('format')!r}, expected {FORMAT!r}", context="parse"
        )
    dimension = _require(document, "dimension", (int,), "complex")
    try:
        kind = ComplexKind(document.get("kind", ComplexKind.BRICK.value))
    except ValueError:
        raise SchemaError(f"unknown kind {document.get('kind')!r}", context="parse") from None

    has_simplices = "simplices" in document
    has_generic = "bricks" in document or "facets" in document
    if has_simplices == has_generic:
        raise SchemaError(
            "give either simplices or bricks and facets, not both or neither", context="parse"
        )
    if has_simplices:
        return _parse_simplicial(document, dimension, kind)
    return _parse_generic(document, dimension, kind)


def load_complex(path: str | Path) -> BrickComplex:
    return parse_complex(read_document(path))


def serialize_complex(M: BrickComplex) -> dict:
    """Inverse of ``parse_complex``; simplicial complexes keep their simplicial form."""
    document: dict = {"format": FORMAT, "dimension": M.dimension, "kind": M.kind.value}
    bricks = M.brick_ids
    if M.vertices is not None:
        document["simplices"] = [list(M.vertices[b]) for b in bricks]
        if list(bricks) != list(range(len(bricks))):
            document["labels"] = [to_jsonable(b) for b in bricks]
        weights = {
            ",".join(str(v) for v in facet_id): format_weight(facet.weight)
            for facet_id, facet in M.facets.items()
            if facet.weight != ONE
        }
        if weights:
            document["weights"] = dict(sorted(weights.items()))
    else:
        document["bricks"] = [
            {"id": to_jsonable(b), "facets": [to_jsonable(f) for f in sorted_ids(M.bricks[b])]}
            for b in bricks
        ]
        document["facets"] = [
            {
                "id": to_jsonable(f),
                "ridges": [to_jsonable(r) for r in sorted_ids(M.facets[f].ridges)],
                "weight": format_weight(M.facets[f].weight),
            }
            for f in sorted_ids(M.facets)
        ]
    if M.interface:
        document["interface"] = [to_jsonable(f) for f in sorted_ids(M.interface)]
    return document


def dumps(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, default=str)


def parse_ordering(document: Any) -> Ordering:
    if not isinstance(document, dict):
        raise SchemaError("an ordering document must be a JSON object", context="parse")
    sequence = _require(document, "ordering", (list,), "ordering")
    return Ordering(tuple(to_identifier(b, "brick id") for b in sequence))


def parse_surface(document: Any) -> Surface:
    if not isinstance(document, dict):
        raise SchemaError("a surface document must be a JSON object", context="parse")
    facets = _require(document, "facets", (list,), "surface")
    return Surface(frozenset(to_identifier(f, "facet id") for f in facets))


def parse_vertex_map(document: Any) -> dict[int, int]:
    if not isinstance(document, dict):
        raise SchemaError("a vertex-map document must be a JSON object", context="parse")
    raw = _require(document, "map", (dict,), "vertex map")
    mapping: dict[int, int] = {}
    for key, value in raw.items():
        try:
            mapping[int(key)] = int(value)
        except (TypeError, ValueError):
            raise SchemaError(
                f"vertex map entry {key!r}: {value!r} is not an integer", context="parse"
            ) from None
    return mapping
