#!/usr/bin/env python3
"""
Main entry point.

This provides a simple `python main.py <command>` interface without installing
the package.
"""

import sys
from pathlib import Path

# Add src to Python path to allow imports
src_path = Path(__file__).parent / "src"
sys.path.insert(0, str(src_path))

from src.idocr.cli.app import app

if __name__ == "__main__":
    app()
