"""thinpos - Backend Module

Exact thin-position engine for weighted brick complexes.

Structure:
    core/           - Configuration, paths, structured logging
    models/         - Complexes, weights, errors
    services/       - Surfaces, orderings, thinning, oracle, constructions
    utils/          - Document reading and writing

Usage:
    from BackEnd.services.constructions import catalog
    from BackEnd.services.thinning import thin_search, certify_locally_thin
"""

__version__ = "1.0.0"
