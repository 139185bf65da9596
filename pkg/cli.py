#!/usr/bin/env python3
"""momentkit CLI - Command line interface."""

import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent))

from momentkit.cli import main


if __name__ == "__main__":
    sys.exit(main())
