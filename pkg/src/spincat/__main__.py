"""Allow running the command-line interface via ``python -m spincat``."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
