"""Numerical toolkit for affine transformation groups of R^n.

Builds the spectral, metric and sign machinery needed to produce
machine-checkable certificates that a finitely generated affine group
fails to act properly discontinuously, plus generators for the known
positive examples.
"""

__version__ = "0.1.0"
