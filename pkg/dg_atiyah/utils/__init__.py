"""Exact linear algebra and expression parsing helpers."""
