#!/usr/bin/env python3
"""
Krein Extension Analyzer - Main Entry Point

Dispatches to the subcommands of krein_analyzer.cli and exits with their
status code (0 success, 1 input error, 2 verification or check failure).
"""

import sys

from krein_analyzer.cli import main


if __name__ == "__main__":
    sys.exit(main())
