"""DG Atiyah -- exact symbolic engine for DG manifolds of amplitude +1."""

__version__ = "0.1.0"
