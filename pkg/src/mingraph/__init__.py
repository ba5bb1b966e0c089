"""Minimal graph surfaces: closed-form families, transformations g(f)
that preserve minimality, and numerical checks of both."""

__version__ = "0.1.0"
