"""Exact difference-operator toolkit for quantum integrable systems.

Subpackages build up from a sparse exact-rational kernel (Laurent
polynomials, factored rational functions, truncated series) to difference
operators on a quantum torus, the trigonometric many-body Hamiltonians and
their dual frames, difference-equation data, symmetric-polynomial oracles,
equivariant vertex series, and the elliptic double deformation.
"""

from .laurent import LaurentPolynomial, VariableRegistry
from .rational import RationalFunction

__all__ = ["LaurentPolynomial", "VariableRegistry", "RationalFunction"]
