"""thinpos - Frontend Module

Command-line front end for the engine.

Structure:
    cli.py          - Argument parsing and dispatch
    commands.py     - One handler per subcommand
    export.py       - DOT export of dual graphs
    utils/          - Error diagnostics and persisted error log

Usage:
    thinpos catalog torus18 > torus.json
    thinpos oracle-width torus.json --bnb
"""

from BackEnd import __version__
