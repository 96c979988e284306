#!/usr/bin/env python3
"""Main entry point for running QMetric as a module."""

from .cli import main

if __name__ == "__main__":
    main()
