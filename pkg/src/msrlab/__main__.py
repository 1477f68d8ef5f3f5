"""Allow `python -m msrlab`."""

import sys

from .cli import main

sys.exit(main())
