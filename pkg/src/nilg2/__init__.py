"""Exact-arithmetic verification and classification of the instanton
condition for the one-parameter family of metric connections induced by
coclosed G2-structures on 7-dimensional 2-step nilpotent Lie algebras."""

__version__ = "0.1.0"
