"""Exact q-calculus toolkit: cyclotomic completions, delta-rings, q-divided powers,
q-Hodge complexes and Habiro-ring arithmetic."""

__version__ = "0.1.0"
