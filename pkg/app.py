"""Console entry: ``python app.py COMMAND ...`` is the same as ``thinpos COMMAND ...``."""

import sys

from FrontEnd.cli import main

if __name__ == "__main__":
    sys.exit(main())
