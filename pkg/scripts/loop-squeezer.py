#!/usr/bin/env python3
"""
loop-squeezer - measurement-induced squeezing in a loop-based optical processor.

Usage:
    loop-squeezer run [--config NAME|PATH] [--out DIR] [--seed N] [--cutoff N]
    loop-squeezer sweep --param PATH --values V [V ...] [--config NAME|PATH]
    loop-squeezer schedule [--config NAME|PATH]
    loop-squeezer fit-mode [--config NAME|PATH] [--seed N]
"""

import sys
from pathlib import Path

# Literal kept in sync with loop_squeezer/constants.py (checked by tests); the import
# below replaces it at runtime.
VERSION = "0.4.0"

# Ensure the package directory is in the path so loop_squeezer can be imported
_package_dir = Path(__file__).parent
if str(_package_dir) not in sys.path:
    sys.path.insert(0, str(_package_dir))

from loop_squeezer.constants import VERSION as CANONICAL_VERSION  # noqa: E402

VERSION = CANONICAL_VERSION

if __name__ == "__main__":
    from loop_squeezer.cli import main

    main()
