"""
Command-line interface for the ID-document OCR pipeline.
"""

from .app import app, main

__all__ = ["app", "main"]
