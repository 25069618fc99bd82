#!/usr/bin/env python3
"""
solidhull - command-line entry point
Usage: python scripts/solidhull.py <subcommand> [options]
"""

import os
import sys

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../src')))

from cli import main

if __name__ == "__main__":
    sys.exit(main())
