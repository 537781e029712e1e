"""Graphviz export of the dual graph, with optional surface or ordering overlays."""

from __future__ import annotations

from typing import Optional

import networkx as nx

from BackEnd.models.complex import BrickComplex, dual_graph
from BackEnd.models.weights import format_weight
from BackEnd.services.orderings import Ordering
from BackEnd.services.surfaces import Surface

HIGHLIGHT_COLOR = "red"


def export_dot(
    M: BrickComplex,
    surface: Optional[Surface] = None,
    ordering: Optional[Ordering] = None,
) -> str:
    """Dual graph as DOT text; surface facets become highlighted edges, heights become labels."""
    source = dual_graph(M)
    names = {brick: f"b{position}" for position, brick in enumerate(M.brick_ids)}
    heights = {}
    if ordering is not None:
        ordering.check(M)
        heights = {brick: ordering.height_of(brick) for brick in M.bricks}

    graph = nx.MultiGraph(name="dual")
    for brick in M.brick_ids:
        label = str(brick)
        if brick in heights:
            label = f"{brick} @ {heights[brick]}"
        graph.add_node(names[brick], label=label)

    highlighted = surface.facets if surface is not None else frozenset()
    for a, b, facet_id, data in source.edges(keys=True, data=True):
        attributes = {"label": format_weight(data["weight"]), "facet": str(facet_id)}
        if facet_id in highlighted:
            attributes.update(color=HIGHLIGHT_COLOR, penwidth="2")
        graph.add_edge(names[a], names[b], **attributes)

    return nx.nx_pydot.to_pydot(graph).to_string()
