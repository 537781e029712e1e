"""Subcommand handlers.

Each handler takes the parsed arguments and returns a JSON-ready payload;
errors propagate as ``EngineError`` and are turned into exit codes by the
dispatcher in ``FrontEnd.cli``.
"""

from __future__ import annotations

import argparse
from collections import Counter
from typing import Any, Callable

from BackEnd.models.complex import BrickComplex, sort_key, validate
from BackEnd.models.weights import parse_weight
from BackEnd.services.constructions import build_connected_sum, catalog, stabilize
from BackEnd.services.oracle import (
    WidthMode,
    generalized_level_set,
    generalized_profile,
    generalized_width,
    min_width,
    trunk_ordering,
    verify_sum_bounds,
)
from BackEnd.services.orderings import (
    Ordering,
    extrema,
    lambda_profile,
    trunk_from_profile,
    width_from_profile,
)
from BackEnd.services.surfaces import classify_surface, enumerate_proper_cycles, is_embedded
from BackEnd.services.thinning import (
    CertificateStatus,
    certify_locally_thin,
    extract_minimal_surfaces,
    thin_search,
)
from BackEnd.utils.io import (
    load_complex,
    parse_identifier,
    parse_ordering,
    parse_surface,
    parse_vertex_map,
    read_document,
    serialize_complex,
)
from FrontEnd.export import export_dot

Handler = Callable[[argparse.Namespace], Any]


def _ordering(args: argparse.Namespace, M: BrickComplex) -> Ordering:
    return parse_ordering(read_document(args.ordering)).check(M)


def cmd_validate(args: argparse.Namespace) -> dict:
    M = load_complex(args.file)
    return {"valid": True, "report": validate(M).to_dict()}


def cmd_info(args: argparse.Namespace) -> dict:
    M = load_complex(args.file)
    return {
        "dimension": M.dimension,
        "kind": M.kind.value,
        "bricks": M.size,
        "facets": len(M.facets),
        "interior_facets": len(M.interior_facets),
        "boundary_facets": len(M.boundary_facets),
        "simplicial": M.is_simplicial,
        "unit_weights": M.unit_weights,
        "zero_weights": M.has_zero_weights,
        "total_weight": str(M.weight_of(M.facets)),
        "report": validate(M).to_dict(),
    }


def cmd_profile(args: argparse.Namespace) -> dict:
    M = load_complex(args.file)
    profile = lambda_profile(M, _ordering(args, M))
    return {
        "profile": profile.as_strings(),
        "extrema": [e.to_dict() for e in extrema(profile)],
        "trunk": str(trunk_from_profile(profile)),
    }


def cmd_width(args: argparse.Namespace) -> dict:
    M = load_complex(args.file)
    profile = lambda_profile(M, _ordering(args, M), cross_check=False)
    return {
        "width": width_from_profile(profile).as_strings(),
        "trunk": str(trunk_from_profile(profile)),
    }


def cmd_thin(args: argparse.Namespace) -> dict:
    M = load_complex(args.file)
    return thin_search(M, _ordering(args, M), budget=args.budget, seed=args.seed).to_dict()


def cmd_certify(args: argparse.Namespace) -> dict:
    M = load_complex(args.file)
    return certify_locally_thin(M, _ordering(args, M), budget=args.budget).to_dict()


def cmd_surfaces(args: argparse.Namespace) -> dict:
    M = load_complex(args.file)
    O = _ordering(args, M)
    payload: dict = {}
    certified = False
    if args.certify:
        certificate = certify_locally_thin(M, O, budget=args.budget)
        certified = certificate.status is CertificateStatus.LOCALLY_THIN
        payload["certificate"] = certificate.to_dict()
    payload["surfaces"] = [s.to_dict() for s in extract_minimal_surfaces(M, O, certified=certified)]
    return payload


def cmd_classify(args: argparse.Namespace) -> dict:
    M = load_complex(args.file)
    surface = parse_surface(read_document(args.surface))
    for facet_id in surface:
        M.require_facet(facet_id, "classify")
    return classify_surface(M, surface).to_dict()


def cmd_oracle_width(args: argparse.Namespace) -> dict:
    M = load_complex(args.file)
    mode = WidthMode.BNB if args.bnb else WidthMode.EXHAUSTIVE
    start = parse_identifier(args.start) if args.start is not None else None
    return min_width(M, mode=mode, start=start, node_budget=args.budget).to_dict()


def cmd_oracle_trunk(args: argparse.Namespace) -> dict:
    M = load_complex(args.file)
    ordering, value = trunk_ordering(M)
    return {"trunk": str(value), "ordering": list(ordering.sequence)}


def cmd_connect_sum(args: argparse.Namespace) -> dict:
    M1 = load_complex(args.first)
    M2 = load_complex(args.second)
    C1 = parse_identifier(args.brick_a)
    C2 = parse_identifier(args.brick_b)
    vertex_map = parse_vertex_map(read_document(args.vertex_map))
    if args.verify:
        report = verify_sum_bounds(M1, M2, C1, C2, vertex_map=vertex_map)
        built = report.sum
        payload = {"report": report.to_dict()}
    else:
        built = build_connected_sum(M1, M2, C1, C2, vertex_map=vertex_map)
        payload = {}
    payload["complex"] = serialize_complex(built.complex)
    payload["first"] = [[a, built.first[a]] for a in sorted(built.first, key=sort_key)]
    payload["second"] = [[a, built.second[a]] for a in sorted(built.second, key=sort_key)]
    return payload


def cmd_stabilize(args: argparse.Namespace) -> dict:
    M = load_complex(args.file)
    stabilized, new_bricks = stabilize(M, parse_identifier(args.brick))
    return {"complex": serialize_complex(stabilized), "new_bricks": new_bricks}


def cmd_catalog(args: argparse.Namespace) -> dict:
    return serialize_complex(catalog(args.name))


def cmd_generalized_profile(args: argparse.Namespace) -> dict:
    M = load_complex(args.file)
    O = _ordering(args, M)
    profile = generalized_profile(M, O)
    return {
        "profile": profile.as_strings(),
        "width": generalized_width(M, O).as_strings(),
        "level_sets": [
            list(generalized_level_set(M, O, i)) for i in range(len(O) + 1)
        ],
    }


def cmd_dot(args: argparse.Namespace) -> dict:
    M = load_complex(args.file)
    surface = parse_surface(read_document(args.surface)) if args.surface else None
    ordering = _ordering(args, M) if args.ordering else None
    return {"format": "dot", "text": export_dot(M, surface=surface, ordering=ordering)}


def cmd_inventory(args: argparse.Namespace) -> dict:
    M = load_complex(args.file)
    bound = parse_weight(args.max_weight, "--max-weight") if args.max_weight is not None else None
    entries = []
    counts: Counter = Counter()
    for surface in enumerate_proper_cycles(M, max_weight=bound, budget=args.budget):
        if not is_embedded(M, surface):
            continue
        classification = classify_surface(M, surface)
        counts[classification.verdict.value] += 1
        entries.append({"facets": list(surface), **classification.to_dict()})
    return {"surfaces": entries, "counts": dict(sorted(counts.items()))}


def register(subparsers: argparse._SubParsersAction) -> None:
    """Add every subcommand to ``subparsers``."""

    def add(name: str, handler: Handler, help_text: str) -> argparse.ArgumentParser:
        parser = subparsers.add_parser(name, help=help_text)
        parser.set_defaults(handler=handler)
        return parser

    def with_file(parser: argparse.ArgumentParser) -> argparse.ArgumentParser:
        parser.add_argument("file", help="complex document (brickcplx-v1)")
        return parser

    def with_ordering(parser: argparse.ArgumentParser) -> argparse.ArgumentParser:
        parser.add_argument("--ordering", required=True, help='ordering document {"ordering": [...]}')
        return parser

    with_file(add("validate", cmd_validate, "parse and report pseudomanifold properties"))
    with_file(add("info", cmd_info, "summarize a complex"))
    with_ordering(with_file(add("profile", cmd_profile, "Λ profile and extrema of an ordering")))
    with_ordering(with_file(add("width", cmd_width, "width and trunk of an ordering")))

    thin = with_ordering(with_file(add("thin", cmd_thin, "search for a locally thin ordering")))
    thin.add_argument("--budget", type=int, default=None, help="orderings visited on plateaus")
    thin.add_argument("--seed", type=int, default=0)

    certify = with_ordering(with_file(add("certify", cmd_certify, "decide local thinness")))
    certify.add_argument("--budget", type=int, default=None)

    surfaces = with_ordering(
        with_file(add("surfaces", cmd_surfaces, "classify level sets at extrema"))
    )
    surfaces.add_argument("--certify", action="store_true", help="certify before extracting")
    surfaces.add_argument("--budget", type=int, default=None)

    classify = with_file(add("classify", cmd_classify, "classify one surface"))
    classify.add_argument("--surface", required=True, help='surface document {"facets": [...]}')

    oracle_width = with_file(add("oracle-width", cmd_oracle_width, "exact minimal width"))
    oracle_width.add_argument("--bnb", action="store_true", help="branch-and-bound mode")
    oracle_width.add_argument("--start", default=None, help="brick the ordering must begin with")
    oracle_width.add_argument("--budget", type=int, default=None, help="branch-and-bound nodes")

    with_file(add("oracle-trunk", cmd_oracle_trunk, "exact minimal trunk"))

    connect = add("connect-sum", cmd_connect_sum, "connected sum of two complexes")
    connect.add_argument("first")
    connect.add_argument("second")
    connect.add_argument("--brick-a", required=True)
    connect.add_argument("--brick-b", required=True)
    connect.add_argument("--vertex-map", required=True, help='{"map": {"v": "w", ...}}')
    connect.add_argument("--verify", action="store_true", help="check the width and trunk bounds")

    stab = with_file(add("stabilize", cmd_stabilize, "cone one brick from a new vertex"))
    stab.add_argument("--brick", required=True)

    cat = add("catalog", cmd_catalog, "print a named complex")
    cat.add_argument("name")

    with_ordering(
        with_file(add("generalized-profile", cmd_generalized_profile, "degree-weighted profile"))
    )

    dot = with_file(add("dot", cmd_dot, "dual graph as DOT text"))
    overlay = dot.add_mutually_exclusive_group()
    overlay.add_argument("--surface", default=None)
    overlay.add_argument("--ordering", default=None)

    inventory = with_file(add("inventory", cmd_inventory, "classify every embedded proper cycle"))
    inventory.add_argument("--max-weight", default=None)
    inventory.add_argument("--budget", type=int, default=None)


