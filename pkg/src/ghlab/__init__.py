"""Verification laboratory for eigenfamilies, harmonic morphisms and p-harmonic functions."""

__version__ = "0.1.0"
