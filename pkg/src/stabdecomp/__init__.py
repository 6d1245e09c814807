"""Exact analysis of translation-invariant 2D Pauli stabilizer codes.

The package decomposes such a code over prime-dimensional qudits into
copies of the toric code plus a trivial remainder, producing an explicit
circuit certificate that can be replayed and checked term by term.
"""

__version__ = "0.1.0"

from .laurent import LaurentPoly, parse_poly

__all__ = ["LaurentPoly", "parse_poly", "__version__"]
