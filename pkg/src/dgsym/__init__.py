"""Exact homological algebra: finitely presented abelian groups, chain
complexes, Dold-Kan normalization, and symmetric spectra over chain
complexes and simplicial abelian groups, with the adjunctions that
connect them."""

from .exact import Z, Q, Matrix, FpGroup, GroupMap, smith_normal_form

__all__ = ["Z", "Q", "Matrix", "FpGroup", "GroupMap", "smith_normal_form"]
