"""Exact bigraded cohomology of double complexes and bidifferential algebras."""

__version__ = "0.1.0"
