"""
Test suite for the ID-document OCR pipeline.

One module per package (imaging, synthgen, segment, classify, bootstrap,
ocr, metrics) plus configuration, CLI and utilities.
"""
