"""Backend Services Module

Engine operations on brick complexes.
"""

from .constructions import catalog, connected_sum, stabilize
from .oracle import min_trunk, min_width, verify_sum_bounds
from .orderings import Ordering, lambda_profile, width_of
from .surfaces import Surface, classify_surface
from .thinning import certify_locally_thin, extract_minimal_surfaces, thin_search

__all__ = [
    "Ordering",
    "Surface",
    "catalog",
    "certify_locally_thin",
    "classify_surface",
    "connected_sum",
    "extract_minimal_surfaces",
    "lambda_profile",
    "min_trunk",
    "min_width",
    "stabilize",
    "thin_search",
    "verify_sum_bounds",
    "width_of",
]
